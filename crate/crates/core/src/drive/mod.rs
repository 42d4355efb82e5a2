//! Velocity commands for the rail drives.
//!
//! Each slider's drive takes a ±10 V analog velocity command. The controller
//! produces it with a unipolar DAC followed by an amplifier, so a joint
//! velocity becomes a DAC code with mid-scale meaning standstill.

mod frames;

use serde::{Deserialize, Serialize};

use crate::kinematics::{forward_kinematics, JointVector, KinematicsError, MachineGeometry};
use crate::trajectory::{JointTrajectory, TrajectorySample};

pub use frames::{read_frame_file, write_frame_csv, write_frame_file, FrameHeader, FRAME_BYTES, HEADER_BYTES, MAGIC};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    pub dac_bits: u32,
    /// Largest DAC output, volts.
    pub dac_fullscale: f64,
    pub opamp_gain: f64,
    /// Command voltage the drives expect at full speed, volts.
    pub driver_fullscale: f64,
    /// Slider speed commanded by `±driver_fullscale`, m/s.
    pub velocity_fullscale: f64,
}

impl Default for DriveConfig {
    fn default() -> Self {
        Self {
            dac_bits: 12,
            dac_fullscale: 3.3,
            opamp_gain: 10.0 / 3.3,
            driver_fullscale: 10.0,
            velocity_fullscale: 0.5,
        }
    }
}

impl DriveConfig {
    pub const KEYS: [&'static str; 5] = [
        "dac_bits",
        "dac_fullscale",
        "opamp_gain",
        "driver_fullscale",
        "velocity_fullscale",
    ];

    pub fn validate(&self) -> Result<(), DriveError> {
        if !(8..=16).contains(&self.dac_bits) {
            return Err(DriveError::Config(format!("dac_bits must be in 8..=16, got {}", self.dac_bits)));
        }
        for (key, v) in [
            ("dac_fullscale", self.dac_fullscale),
            ("opamp_gain", self.opamp_gain),
            ("driver_fullscale", self.driver_fullscale),
            ("velocity_fullscale", self.velocity_fullscale),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(DriveError::Config(format!("{key} must be positive and finite, got {v}")));
            }
        }
        let amplified = self.dac_fullscale * self.opamp_gain;
        if (amplified - self.driver_fullscale).abs() > 1e-9 {
            return Err(DriveError::Config(format!(
                "dac_fullscale * opamp_gain = {amplified} V does not match driver_fullscale = {} V",
                self.driver_fullscale
            )));
        }
        Ok(())
    }

    /// Sets one field by name. Returns `false` for an unknown key.
    pub fn set(&mut self, key: &str, value: f64) -> bool {
        match key {
            "dac_bits" => self.dac_bits = if value.fract() == 0.0 && value >= 0.0 { value as u32 } else { 0 },
            "dac_fullscale" => self.dac_fullscale = value,
            "opamp_gain" => self.opamp_gain = value,
            "driver_fullscale" => self.driver_fullscale = value,
            "velocity_fullscale" => self.velocity_fullscale = value,
            _ => return false,
        }
        true
    }

    pub fn max_code(&self) -> u16 {
        ((1u32 << self.dac_bits) - 1) as u16
    }

    /// Velocity step between adjacent codes, m/s.
    pub fn velocity_lsb(&self) -> f64 {
        2.0 * self.velocity_fullscale / f64::from(self.max_code())
    }

    /// DAC code for a joint velocity, and whether it had to be clamped.
    pub fn quantize(&self, velocity: f64) -> (u16, bool) {
        let x = velocity / self.velocity_fullscale;
        let clamped = x.abs() > 1.0;
        let x = x.clamp(-1.0, 1.0);
        let ideal = (x + 1.0) / 2.0 * f64::from(self.max_code());
        // f64::round breaks ties away from zero
        (ideal.round() as u16, clamped)
    }

    /// Driver voltage produced by a DAC code.
    pub fn code_voltage(&self, code: u16) -> f64 {
        (f64::from(code) / f64::from(self.max_code()) * 2.0 - 1.0) * self.driver_fullscale
    }

    /// Slider velocity commanded by a DAC code.
    pub fn code_velocity(&self, code: u16) -> f64 {
        self.code_voltage(code) / self.driver_fullscale * self.velocity_fullscale
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveFrame {
    pub t: f64,
    pub dac_code: [u16; 6],
    pub driver_voltage: [f64; 6],
}

impl DriveFrame {
    pub fn from_codes(t: f64, dac_code: [u16; 6], cfg: &DriveConfig) -> Self {
        Self {
            t,
            dac_code,
            driver_voltage: dac_code.map(|c| cfg.code_voltage(c)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Emission {
    pub frames: Vec<DriveFrame>,
    /// Joint velocities beyond `velocity_fullscale`, counted per joint and frame.
    pub clamped: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DriveError {
    #[error("drive config: {0}")]
    Config(String),
    #[error("frame {frame}: slider {limb} reached {position} m, outside its rail travel")]
    RailOverrun { frame: usize, limb: usize, position: f64 },
    #[error("frame {frame}: {error}")]
    Kinematics { frame: usize, error: KinematicsError },
    #[error("frame file: {0}")]
    Format(String),
}

/// One frame per trajectory sample, in time order.
pub fn emit(traj: &JointTrajectory, cfg: &DriveConfig) -> Emission {
    let mut clamped = 0;
    let frames = traj
        .samples
        .iter()
        .map(|s| {
            let codes = s.joint_velocity.map(|v| {
                let (code, hit) = cfg.quantize(v);
                clamped += usize::from(hit);
                code
            });
            DriveFrame::from_codes(s.t, codes, cfg)
        })
        .collect();
    Emission { frames, clamped }
}

/// Integrates the commanded velocities with explicit Euler from `initial`
/// and recovers each platform pose with the forward kinematics.
pub fn replay(
    frames: &[DriveFrame],
    geom: &MachineGeometry,
    cfg: &DriveConfig,
    initial: &JointVector,
) -> Result<JointTrajectory, DriveError> {
    let mut samples: Vec<TrajectorySample> = Vec::with_capacity(frames.len());
    let mut q = *initial;
    let mut guess = geom.home_pose;
    for (k, frame) in frames.iter().enumerate() {
        if k > 0 {
            let prev = &frames[k - 1];
            let dt = frame.t - prev.t;
            for i in 0..6 {
                q[i] += cfg.code_velocity(prev.dac_code[i]) * dt;
            }
        }
        for i in 0..6 {
            let (lo, hi) = geom.rail_travel[i];
            if !(lo..=hi).contains(&q[i]) {
                return Err(DriveError::RailOverrun {
                    frame: k,
                    limb: i + 1,
                    position: q[i],
                });
            }
        }
        let pose = forward_kinematics(geom, &q, &guess)
            .map_err(|error| DriveError::Kinematics { frame: k, error })?
            .pose;
        guess = pose;
        samples.push(TrajectorySample {
            t: frame.t,
            pose,
            joints: q,
            joint_velocity: frame.dac_code.map(|c| cfg.code_velocity(c)),
            source_line: 0,
        });
    }
    Ok(JointTrajectory {
        samples,
        geometry_fingerprint: geom.fingerprint(),
    })
}

/// Largest slider position difference between two trajectories sampled at
/// the same instants.
pub fn max_joint_error(a: &JointTrajectory, b: &JointTrajectory) -> f64 {
    a.samples
        .iter()
        .zip(&b.samples)
        .map(|(x, y)| x.joints.max_abs_diff(&y.joints))
        .fold(0.0, f64::max)
}

/// How far a replay of `traj` may drift: one velocity LSB over the whole
/// duration, plus one sample-to-sample joint step for the mismatch between
/// the differentiated velocities and the Euler update.
pub fn tracking_bound(traj: &JointTrajectory, cfg: &DriveConfig) -> f64 {
    let step = traj
        .samples
        .windows(2)
        .map(|w| w[1].joints.max_abs_diff(&w[0].joints))
        .fold(0.0, f64::max);
    cfg.velocity_lsb() * traj.duration() + step
}
