use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{JointTrajectory, PlannerConfig, TrajectorySample};
use crate::kinematics::{JointVector, PlatformPose};

pub const CSV_HEADER: &str =
    "t,px,py,pz,alpha,beta,gamma,q1,q2,q3,q4,q5,q6,qd1,qd2,qd3,qd4,qd5,qd6,line";

const COLUMNS: usize = 20;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TrajectoryFileError {
    #[error("trajectory file: expected header `{CSV_HEADER}`")]
    Header,
    #[error("trajectory file row {row}: {reason}")]
    Row { row: usize, reason: String },
    #[error("trajectory file has no samples")]
    Empty,
    #[error("trajectory sidecar: {0}")]
    Sidecar(String),
}

/// Metadata written next to a trajectory CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySidecar {
    pub geometry_fingerprint: String,
    pub planner: PlannerConfig,
    pub samples: usize,
    pub duration: f64,
    /// Set when the samples lie on a uniform clock.
    pub sample_rate: Option<f64>,
}

impl TrajectorySidecar {
    pub fn describe(traj: &JointTrajectory, planner: &PlannerConfig) -> Self {
        Self {
            geometry_fingerprint: traj.geometry_fingerprint.clone(),
            planner: *planner,
            samples: traj.samples.len(),
            duration: traj.duration(),
            sample_rate: traj.uniform_rate(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("sidecar serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, TrajectoryFileError> {
        serde_json::from_str(text).map_err(|e| TrajectoryFileError::Sidecar(e.to_string()))
    }
}

/// `traj.csv` becomes `traj.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Nine significant digits; negative zero is written as zero.
pub(crate) fn sig9(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.8e}")
}

pub fn write_csv(traj: &JointTrajectory) -> String {
    let mut out = String::with_capacity(256 * (traj.samples.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in &traj.samples {
        out.push_str(&sig9(s.t));
        let values = s.pose.to_array().into_iter().chain(s.joints.0).chain(s.joint_velocity);
        for v in values {
            out.push(',');
            out.push_str(&sig9(v));
        }
        let _ = writeln!(out, ",{}", s.source_line);
    }
    out
}

/// Parses samples written by [`write_csv`]. The geometry fingerprint lives
/// in the sidecar and is left empty here.
pub fn read_csv(text: &str) -> Result<JointTrajectory, TrajectoryFileError> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(CSV_HEADER) {
        return Err(TrajectoryFileError::Header);
    }
    let mut samples = Vec::new();
    for (idx, line) in lines.enumerate() {
        let row = idx + 2;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != COLUMNS {
            return Err(TrajectoryFileError::Row {
                row,
                reason: format!("expected {COLUMNS} fields, found {}", fields.len()),
            });
        }
        let mut v = [0.0; COLUMNS - 1];
        for (k, f) in fields[..COLUMNS - 1].iter().enumerate() {
            v[k] = f.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| TrajectoryFileError::Row {
                row,
                reason: format!("bad number `{f}`"),
            })?;
        }
        let source_line = fields[COLUMNS - 1].parse::<usize>().map_err(|_| TrajectoryFileError::Row {
            row,
            reason: format!("bad line number `{}`", fields[COLUMNS - 1]),
        })?;
        if let Some(prev) = samples.last().map(|s: &TrajectorySample| s.t) {
            if v[0] <= prev {
                return Err(TrajectoryFileError::Row {
                    row,
                    reason: "time does not increase".into(),
                });
            }
        }
        samples.push(TrajectorySample {
            t: v[0],
            pose: PlatformPose::from_array([v[1], v[2], v[3], v[4], v[5], v[6]]),
            joints: JointVector([v[7], v[8], v[9], v[10], v[11], v[12]]),
            joint_velocity: [v[13], v[14], v[15], v[16], v[17], v[18]],
            source_line,
        });
    }
    if samples.is_empty() {
        return Err(TrajectoryFileError::Empty);
    }
    Ok(JointTrajectory {
        samples,
        geometry_fingerprint: String::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gcode::{compile, ModalState};
    use crate::kinematics::MachineGeometry;
    use crate::trajectory::{plan, verify};

    #[test]
    fn number_format() {
        assert_eq!(sig9(0.0), "0.00000000e0");
        assert_eq!(sig9(-0.0), "0.00000000e0");
        assert_eq!(sig9(0.35), "3.50000000e-1");
        assert_eq!(sig9(-123456.789), "-1.23456789e5");
        assert_eq!(sig9(1.0 / 3.0), "3.33333333e-1");
    }

    #[test]
    fn round_trip_keeps_nine_digits_and_verifies() {
        let g = MachineGeometry::reference();
        let cmds = compile("G1 X3 Y4 Z-2 B1 F300\nG2 X3 Y-4 R5", &ModalState::at_home(g.home_pose))
            .unwrap()
            .commands;
        let traj = plan(&cmds, &g, &PlannerConfig::default()).unwrap();
        let text = write_csv(&traj);
        assert!(text.starts_with(CSV_HEADER));
        let back = read_csv(&text).unwrap();
        assert_eq!(back.samples.len(), traj.samples.len());
        for (a, b) in traj.samples.iter().zip(&back.samples) {
            assert_eq!(a.source_line, b.source_line);
            assert!((a.t - b.t).abs() <= 5e-9 * a.t.abs().max(1e-300));
            assert!(a.joints.max_abs_diff(&b.joints) < 1e-9);
            assert!(a.pose.max_component_diff(&b.pose) < 1e-9);
        }
        assert_eq!(write_csv(&back), text);
        let report = verify(&back, &g, Some(&cmds)).unwrap();
        assert!(report.max_pose_error() < 1e-7);
    }

    #[test]
    fn rejects_malformed_files() {
        assert_eq!(read_csv("t,x\n"), Err(TrajectoryFileError::Header));
        assert_eq!(read_csv(&format!("{CSV_HEADER}\n")), Err(TrajectoryFileError::Empty));
        let short = format!("{CSV_HEADER}\n0,1,2\n");
        assert!(matches!(read_csv(&short), Err(TrajectoryFileError::Row { row: 2, .. })));
    }

    #[test]
    fn sidecar_round_trip() {
        let g = MachineGeometry::reference();
        let traj = plan(&[], &g, &PlannerConfig::default()).unwrap();
        let side = TrajectorySidecar::describe(&traj, &PlannerConfig::default());
        assert_eq!(TrajectorySidecar::from_json(&side.to_json()).unwrap(), side);
        assert_eq!(sidecar_path(Path::new("out/traj.csv")), PathBuf::from("out/traj.json"));
    }
}
