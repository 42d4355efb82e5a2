use std::fmt;

use super::interpolate::{angular_distance, interpolate, lerp_pose};
use super::{JointTrajectory, PlanError, PlannerConfig, TrajectorySample, DEGENERATE_LENGTH};
use crate::gcode::{MotionCommand, MotionKind};
use crate::kinematics::{discriminants, inverse_kinematics, JointVector, MachineGeometry, PlatformPose};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationReason {
    /// The arm cannot reach its rail with the required clearance.
    Discriminant,
    /// The slider would leave its rail travel, less the margin.
    RailLimit,
}

impl fmt::Display for ViolationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationReason::Discriminant => "discriminant",
            ViolationReason::RailLimit => "rail_limit",
        })
    }
}

/// Slider positions for `pose`, provided every limb keeps `margin` meters of
/// clearance from both the reach boundary and the rail ends. On failure,
/// returns the first offending limb (1-based) and why.
pub fn check_pose(
    geom: &MachineGeometry,
    pose: &PlatformPose,
    margin: f64,
) -> Result<JointVector, (usize, ViolationReason)> {
    let disc = discriminants(geom, pose);
    if let Some(i) = disc.iter().position(|d| !(*d >= 0.0 && d.sqrt() >= margin)) {
        return Err((i + 1, ViolationReason::Discriminant));
    }
    let q = inverse_kinematics(geom, pose).map_err(|_| (1, ViolationReason::Discriminant))?;
    for i in 0..6 {
        let (lo, hi) = geom.rail_travel[i];
        if q[i] < lo + margin || q[i] > hi - margin {
            return Err((i + 1, ViolationReason::RailLimit));
        }
    }
    Ok(q)
}

fn checked(geom: &MachineGeometry, pose: PlatformPose, margin: f64, line: usize) -> Result<JointVector, PlanError> {
    check_pose(geom, &pose, margin).map_err(|(limb, reason)| PlanError::WorkspaceViolation {
        line,
        pose,
        limb,
        reason,
    })
}

fn sample(t: f64, pose: PlatformPose, joints: JointVector, source_line: usize) -> TrajectorySample {
    TrajectorySample {
        t,
        pose,
        joints,
        joint_velocity: [0.0; 6],
        source_line,
    }
}

fn slope(a: &TrajectorySample, b: &TrajectorySample) -> [f64; 6] {
    let dt = b.t - a.t;
    std::array::from_fn(|i| (b.joints[i] - a.joints[i]) / dt)
}

/// Finite-difference joint velocities over each run `first..=last`: central
/// inside, one-sided at the ends. A sample shared by two runs takes the
/// forward difference of the later one.
fn differentiate(samples: &mut [TrajectorySample], runs: &[(usize, usize)]) {
    for &(first, last) in runs {
        for k in first..=last {
            let v = if k == first {
                slope(&samples[k], &samples[k + 1])
            } else if k == last {
                slope(&samples[k - 1], &samples[k])
            } else {
                slope(&samples[k - 1], &samples[k + 1])
            };
            samples[k].joint_velocity = v;
        }
    }
}

/// Turns motion commands into a joint trajectory whose samples are the
/// interpolation points of each move, starting at home at `t = 0`.
///
/// Time advances so the platform travels at each command's feed (rapids at
/// `cfg.rapid_feed`). Moves that go nowhere are skipped. The whole program is
/// rejected at the first pose that leaves the workspace.
pub fn plan(
    commands: &[MotionCommand],
    geom: &MachineGeometry,
    cfg: &PlannerConfig,
) -> Result<JointTrajectory, PlanError> {
    cfg.validate()?;
    let home = geom.home_pose;
    let first_line = commands.first().map_or(0, |c| c.source_line);
    let q_home = checked(geom, home, cfg.workspace_margin, first_line)?;
    let mut samples = vec![sample(0.0, home, q_home, 0)];
    let mut runs = Vec::new();
    let mut current = home;
    let mut t = 0.0;

    for cmd in commands {
        let moves = interpolate(cmd, &current, cfg);
        if moves.degenerate {
            continue;
        }
        let speed = cmd.feed.unwrap_or(cfg.rapid_feed);
        let cartesian = matches!(cmd.kind, MotionKind::Arc { .. })
            || (cmd.target.position() - current.position()).norm() > DEGENERATE_LENGTH;
        let first = samples.len() - 1;
        for w in moves.poses.windows(2) {
            let distance = if cartesian {
                (w[1].position() - w[0].position()).norm()
            } else {
                cfg.characteristic_radius * angular_distance(&w[0], &w[1])
            };
            t += distance / speed;
            let q = checked(geom, w[1], cfg.workspace_margin, cmd.source_line)?;
            samples.push(sample(t, w[1], q, cmd.source_line));
        }
        runs.push((first, samples.len() - 1));
        current = cmd.target;
    }

    differentiate(&mut samples, &runs);
    Ok(JointTrajectory {
        samples,
        geometry_fingerprint: geom.fingerprint(),
    })
}

/// Re-samples a trajectory onto the clock `t_k = k / cfg.sample_rate`.
///
/// Poses between the source samples are interpolated linearly and mapped
/// through the inverse kinematics again, so every output sample is an exact
/// kinematic solution lying on the source path. The last grid point at or
/// after the end holds the final pose.
pub fn resample(
    traj: &JointTrajectory,
    geom: &MachineGeometry,
    cfg: &PlannerConfig,
) -> Result<JointTrajectory, PlanError> {
    cfg.validate()?;
    let src = &traj.samples;
    let Some(last) = src.last() else {
        return Ok(traj.clone());
    };
    let rate = cfg.sample_rate;
    let count = (last.t * rate * (1.0 - 1e-12)).ceil() as usize + 1;
    let mut samples = Vec::with_capacity(count);
    let mut j = 0;
    for k in 0..count {
        let t = k as f64 / rate;
        while j + 1 < src.len() && src[j + 1].t <= t {
            j += 1;
        }
        let (pose, line) = if j + 1 == src.len() {
            (src[j].pose, src[j].source_line)
        } else {
            let u = (t - src[j].t) / (src[j + 1].t - src[j].t);
            if u == 0.0 {
                (src[j].pose, src[j].source_line)
            } else {
                (lerp_pose(&src[j].pose, &src[j + 1].pose, u), src[j + 1].source_line)
            }
        };
        let q = checked(geom, pose, cfg.workspace_margin, line)?;
        samples.push(sample(t, pose, q, line));
    }
    if samples.len() > 1 {
        let n = samples.len();
        differentiate(&mut samples, &[(0, n - 1)]);
    }
    Ok(JointTrajectory {
        samples,
        geometry_fingerprint: traj.geometry_fingerprint.clone(),
    })
}
