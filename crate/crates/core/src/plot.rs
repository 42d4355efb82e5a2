//! Static SVG rendering of a trajectory: the XY tool path beside the six
//! slider position curves. Output depends only on the samples, so equal
//! trajectories give byte-identical files.

use std::fmt::Write as _;

use crate::trajectory::JointTrajectory;

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 440.0;
const PANEL: f64 = 400.0;
const MARGIN: f64 = 20.0;
const COLORS: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    lo: (f64, f64),
    hi: (f64, f64),
}

impl Frame {
    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let sx = (x - self.lo.0) / (self.hi.0 - self.lo.0);
        let sy = (y - self.lo.1) / (self.hi.1 - self.lo.1);
        (self.x0 + sx * self.w, self.y0 + self.h - sy * self.h)
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    let pad = ((hi - lo) * 0.05).max(1e-6);
    (lo - pad, hi + pad)
}

fn polyline(out: &mut String, points: impl Iterator<Item = (f64, f64)>, color: &str) {
    out.push_str("<polyline fill=\"none\" stroke=\"");
    out.push_str(color);
    out.push_str("\" stroke-width=\"1\" points=\"");
    let mut last = None;
    for (x, y) in points {
        let p = (format!("{x:.2}"), format!("{y:.2}"));
        if last.as_ref() == Some(&p) {
            continue;
        }
        let _ = write!(out, "{},{} ", p.0, p.1);
        last = Some(p);
    }
    if out.ends_with(' ') {
        out.pop();
    }
    out.push_str("\"/>\n");
}

fn label(out: &mut String, x: f64, y: f64, text: &str) {
    let _ = writeln!(
        out,
        "<text x=\"{x:.2}\" y=\"{y:.2}\" font-family=\"monospace\" font-size=\"12\">{text}</text>"
    );
}

pub fn render_svg(traj: &JointTrajectory) -> String {
    let s = &traj.samples;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // XY path in millimeters, equal scale on both axes
    let (xl, xh) = bounds(s.iter().map(|p| p.pose.position().x * 1e3));
    let (yl, yh) = bounds(s.iter().map(|p| p.pose.position().y * 1e3));
    let half = (xh - xl).max(yh - yl) / 2.0;
    let (cx, cy) = ((xl + xh) / 2.0, (yl + yh) / 2.0);
    let xy = Frame {
        x0: MARGIN,
        y0: MARGIN,
        w: PANEL,
        h: PANEL,
        lo: (cx - half, cy - half),
        hi: (cx + half, cy + half),
    };
    let _ = writeln!(
        out,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{PANEL}\" height=\"{PANEL}\" fill=\"none\" stroke=\"#999\"/>"
    );
    polyline(
        &mut out,
        s.iter().map(|p| xy.map(p.pose.position().x * 1e3, p.pose.position().y * 1e3)),
        "#000",
    );
    label(
        &mut out,
        MARGIN + 4.0,
        MARGIN + 14.0,
        &format!("XY path, mm: x [{:.3}, {:.3}] y [{:.3}, {:.3}]", xy.lo.0, xy.hi.0, xy.lo.1, xy.hi.1),
    );

    // slider positions against time
    let (tl, th) = bounds(s.iter().map(|p| p.t));
    let (ql, qh) = bounds(s.iter().flat_map(|p| p.joints.0));
    let joints = Frame {
        x0: 2.0 * MARGIN + PANEL + 100.0,
        y0: MARGIN,
        w: WIDTH - (3.0 * MARGIN + PANEL + 100.0),
        h: PANEL,
        lo: (tl, ql),
        hi: (th, qh),
    };
    let _ = writeln!(
        out,
        "<rect x=\"{:.2}\" y=\"{MARGIN}\" width=\"{:.2}\" height=\"{PANEL}\" fill=\"none\" stroke=\"#999\"/>",
        joints.x0, joints.w
    );
    for (i, color) in COLORS.iter().enumerate() {
        polyline(&mut out, s.iter().map(|p| joints.map(p.t, p.joints[i])), color);
        label(&mut out, joints.x0 - 96.0, MARGIN + 14.0 + 16.0 * i as f64, &format!("q{}", i + 1));
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            joints.x0 - 70.0,
            MARGIN + 10.0 + 16.0 * i as f64,
            joints.x0 - 50.0,
            MARGIN + 10.0 + 16.0 * i as f64
        );
    }
    label(
        &mut out,
        joints.x0 + 4.0,
        MARGIN + 14.0,
        &format!("sliders, m: t [{:.3}, {:.3}] s q [{:.3}, {:.3}]", tl, th, ql, qh),
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gcode::{compile, ModalState};
    use crate::kinematics::MachineGeometry;
    use crate::trajectory::{plan, PlannerConfig};

    #[test]
    fn renders_one_path_and_six_curves() {
        let g = MachineGeometry::reference();
        let cmds = compile("G1 X10 F600\nG1 Y10\nG1 X0\nG1 Y0", &ModalState::at_home(g.home_pose))
            .unwrap()
            .commands;
        let traj = plan(&cmds, &g, &PlannerConfig::default()).unwrap();
        let svg = render_svg(&traj);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 7);
        assert_eq!(svg, render_svg(&traj));
    }

    #[test]
    fn single_sample_still_renders() {
        let g = MachineGeometry::reference();
        let traj = plan(&[], &g, &PlannerConfig::default()).unwrap();
        let svg = render_svg(&traj);
        assert!(!svg.contains("NaN"));
    }
}
