use std::collections::HashMap;

use nalgebra::Vector3;

use super::JointTrajectory;
use crate::gcode::{MotionCommand, MotionKind};
use crate::kinematics::{closure_residuals, forward_kinematics, KinematicsError, MachineGeometry, PlatformPose};

/// Distance of the trajectory from the programmed path, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PathDeviation {
    /// Largest distance from a sample on a straight move to its segment.
    pub max_linear: f64,
    /// Largest radial error of a sample on an arc.
    pub max_arc_radial: f64,
    pub checked_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyReport {
    pub samples: usize,
    /// Largest position error of the forward kinematics replay, meters.
    pub max_position_error: f64,
    /// Largest orientation error of the replay, radians.
    pub max_angle_error: f64,
    /// Largest `|‖b_i‖ - l_i|` over the stored poses and joints, meters.
    pub max_closure_residual: f64,
    /// m/s
    pub max_joint_speed: f64,
    pub max_fk_iterations: usize,
    /// Present when the program the trajectory was planned from is supplied.
    pub path: Option<PathDeviation>,
}

impl VerifyReport {
    pub fn max_pose_error(&self) -> f64 {
        self.max_position_error.max(self.max_angle_error)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("sample {sample}: {error}")]
pub struct VerifyError {
    /// 0-based index of the first sample the replay failed on.
    pub sample: usize,
    pub error: KinematicsError,
}

fn segment_distance(p: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    let d = b - a;
    let len2 = d.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let u = ((p - a).dot(&d) / len2).clamp(0.0, 1.0);
    (p - (a + d * u)).norm()
}

/// Replays every sample through the forward kinematics, each solve starting
/// from the previous solution (the first from home), and measures how well
/// the stored poses are recovered.
///
/// With `program`, each sample is also compared with the move on its source
/// line. Moves are assumed to start where the previous one ended, the first
/// at the geometry's home pose.
pub fn verify(
    traj: &JointTrajectory,
    geom: &MachineGeometry,
    program: Option<&[MotionCommand]>,
) -> Result<VerifyReport, VerifyError> {
    let mut report = VerifyReport {
        samples: traj.samples.len(),
        max_position_error: 0.0,
        max_angle_error: 0.0,
        max_closure_residual: 0.0,
        max_joint_speed: traj.max_joint_speed(),
        max_fk_iterations: 0,
        path: None,
    };

    let mut guess = geom.home_pose;
    for (index, s) in traj.samples.iter().enumerate() {
        let sol = forward_kinematics(geom, &s.joints, &guess).map_err(|error| VerifyError { sample: index, error })?;
        let a = sol.pose.to_array();
        let b = s.pose.to_array();
        for k in 0..3 {
            report.max_position_error = report.max_position_error.max((a[k] - b[k]).abs());
        }
        for k in 3..6 {
            let d = crate::kinematics::normalize_angle(a[k] - b[k]).abs();
            report.max_angle_error = report.max_angle_error.max(d);
        }
        for r in closure_residuals(geom, &s.pose, &s.joints) {
            report.max_closure_residual = report.max_closure_residual.max(r.abs());
        }
        report.max_fk_iterations = report.max_fk_iterations.max(sol.iterations);
        guess = sol.pose;
    }

    if let Some(commands) = program {
        report.path = Some(path_deviation(traj, geom.home_pose, commands));
    }
    Ok(report)
}

fn path_deviation(traj: &JointTrajectory, home: PlatformPose, commands: &[MotionCommand]) -> PathDeviation {
    let mut starts = HashMap::new();
    let mut start = home;
    for cmd in commands {
        starts.entry(cmd.source_line).or_insert((start, *cmd));
        start = cmd.target;
    }

    let mut out = PathDeviation::default();
    for s in &traj.samples {
        let Some((from, cmd)) = starts.get(&s.source_line) else {
            continue;
        };
        let p = s.pose.position();
        match cmd.kind {
            MotionKind::Rapid | MotionKind::Linear => {
                let d = segment_distance(&p, &from.position(), &cmd.target.position());
                out.max_linear = out.max_linear.max(d);
            }
            MotionKind::Arc { center, .. } => {
                let r = (from.position().xy() - center.xy()).norm();
                let d = ((p.xy() - center.xy()).norm() - r).abs();
                out.max_arc_radial = out.max_arc_radial.max(d);
            }
        }
        out.checked_samples += 1;
    }
    out
}
