use std::fmt::Write;

use super::interp::{ArcSense, MotionCommand, MotionKind};
use crate::kinematics::PlatformPose;

fn num(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

/// Writes commands back as G-Code in a fixed normal form: a `G21 G90 G17`
/// preamble, then one uppercase block per command carrying every axis,
/// arc centers as I/J offsets and the feed in mm/min, all with four
/// decimals.
///
/// `origin` is the work origin the commands were interpreted against.
pub fn to_canonical(commands: &[MotionCommand], origin: &PlatformPose) -> String {
    let mut out = String::from("G21 G90 G17\n");
    let o_pos = origin.position();
    let o_ang = origin.angles();
    let mut start = o_pos;
    for c in commands {
        let p = (c.target.position() - o_pos) * 1000.0;
        let a = c.target.angles();
        let code = match c.kind {
            MotionKind::Rapid => "G0",
            MotionKind::Linear => "G1",
            MotionKind::Arc { sense: ArcSense::Cw, .. } => "G2",
            MotionKind::Arc { sense: ArcSense::Ccw, .. } => "G3",
        };
        out.push_str(code);
        for (letter, v) in ['X', 'Y', 'Z'].iter().zip(p.iter()) {
            let _ = write!(out, " {letter}{}", num(*v));
        }
        for (k, letter) in ['A', 'B', 'C'].iter().enumerate() {
            let _ = write!(out, " {letter}{}", num((a[k] - o_ang[k]).to_degrees()));
        }
        if let MotionKind::Arc { center, .. } = c.kind {
            let off = (center - start) * 1000.0;
            let _ = write!(out, " I{} J{}", num(off.x), num(off.y));
        }
        if let Some(f) = c.feed {
            let _ = write!(out, " F{}", num(f * 60_000.0));
        }
        out.push('\n');
        start = c.target.position();
    }
    out
}
