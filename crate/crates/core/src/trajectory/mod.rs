//! From motion commands to a time-stamped joint trajectory.
//!
//! [`plan`] interpolates each command into closely spaced poses, stamps them
//! so the tool moves at the commanded feed, and maps every pose through the
//! inverse kinematics. [`resample`] puts the result on a uniform clock, and
//! [`verify`] replays a trajectory through the forward kinematics.

mod interpolate;
mod io;
mod plan;
mod verify;

use serde::{Deserialize, Serialize};

use crate::kinematics::{JointVector, PlatformPose};

pub use interpolate::{interpolate, Interpolation};
pub(crate) use io::sig9;
pub use io::{read_csv, sidecar_path, write_csv, TrajectoryFileError, TrajectorySidecar, CSV_HEADER};
pub use plan::{check_pose, plan, resample, ViolationReason};
pub use verify::{verify, PathDeviation, VerifyError, VerifyReport};

/// Moves shorter than this (meters, or meters of equivalent angular travel)
/// produce no motion.
pub const DEGENERATE_LENGTH: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerConfig {
    /// Largest distance between consecutive poses of a straight move, meters.
    pub max_cartesian_step: f64,
    /// Largest chord-to-arc deviation, meters.
    pub arc_chord_tolerance: f64,
    /// Speed of `G0` moves, m/s.
    pub rapid_feed: f64,
    /// Required clearance from the workspace boundary and the rail ends, meters.
    pub workspace_margin: f64,
    /// Hz
    pub sample_rate: f64,
    /// Converts orientation change to path length for timing, meters per radian.
    pub characteristic_radius: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            max_cartesian_step: 1e-4,
            arc_chord_tolerance: 1e-5,
            rapid_feed: 0.05,
            workspace_margin: 1e-6,
            sample_rate: 1000.0,
            characteristic_radius: 0.1,
        }
    }
}

impl PlannerConfig {
    pub const KEYS: [&'static str; 6] = [
        "max_cartesian_step",
        "arc_chord_tolerance",
        "rapid_feed",
        "workspace_margin",
        "sample_rate",
        "characteristic_radius",
    ];

    pub fn validate(&self) -> Result<(), PlanError> {
        let fields = [
            self.max_cartesian_step,
            self.arc_chord_tolerance,
            self.rapid_feed,
            self.workspace_margin,
            self.sample_rate,
            self.characteristic_radius,
        ];
        for (key, value) in Self::KEYS.iter().zip(fields) {
            if !(value.is_finite() && value > 0.0) {
                return Err(PlanError::Config(format!("{key} must be positive and finite, got {value}")));
            }
        }
        if self.max_cartesian_step < self.arc_chord_tolerance {
            return Err(PlanError::Config(
                "max_cartesian_step must not be smaller than arc_chord_tolerance".into(),
            ));
        }
        Ok(())
    }

    /// Sets one field by name. Returns `false` for an unknown key.
    pub fn set(&mut self, key: &str, value: f64) -> bool {
        let slot = match key {
            "max_cartesian_step" => &mut self.max_cartesian_step,
            "arc_chord_tolerance" => &mut self.arc_chord_tolerance,
            "rapid_feed" => &mut self.rapid_feed,
            "workspace_margin" => &mut self.workspace_margin,
            "sample_rate" => &mut self.sample_rate,
            "characteristic_radius" => &mut self.characteristic_radius,
            _ => return false,
        };
        *slot = value;
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    /// seconds
    pub t: f64,
    pub pose: PlatformPose,
    pub joints: JointVector,
    /// m/s
    pub joint_velocity: [f64; 6],
    /// G-Code line that produced the sample; 0 for the initial home sample.
    pub source_line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointTrajectory {
    pub samples: Vec<TrajectorySample>,
    pub geometry_fingerprint: String,
}

impl JointTrajectory {
    pub fn duration(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    /// Sample rate if the samples sit on a uniform clock, allowing for times
    /// rounded to nine significant digits.
    pub fn uniform_rate(&self) -> Option<f64> {
        let n = self.samples.len();
        let t0 = self.samples.first()?.t;
        let span = self.samples.get(1).map(|_| self.samples[n - 1].t - t0)?;
        if span <= 0.0 {
            return None;
        }
        let rate = ((n - 1) as f64 / span * 1e6).round() / 1e6;
        self.samples
            .iter()
            .enumerate()
            .all(|(k, s)| (s.t - t0 - k as f64 / rate).abs() <= 1e-8 * s.t.abs().max(1.0))
            .then_some(rate)
    }

    pub fn max_joint_speed(&self) -> f64 {
        self.samples
            .iter()
            .flat_map(|s| s.joint_velocity)
            .fold(0.0, |m: f64, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanError {
    #[error("line {line}: workspace violation on limb {limb} ({reason}) at pose {pose}")]
    WorkspaceViolation {
        line: usize,
        pose: PlatformPose,
        limb: usize,
        reason: ViolationReason,
    },
    #[error("planner config: {0}")]
    Config(String),
}
