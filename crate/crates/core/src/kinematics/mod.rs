//! Geometry and kinematics of the Hexaglide: six fixed-length arms joining a
//! moving platform to sliders on rails parallel to the base X axis.
//!
//! Everything here is SI (meters, radians) and free of hidden state.

mod fk;
mod geometry;
mod ik;
mod jacobian;
mod mobility;
mod pose;
mod rotation;

pub use fk::{forward_kinematics, forward_kinematics_with, FkOptions, FkSolution};
pub use geometry::{
    GeometryError, MachineGeometry, CONSTRAINT_NAMES, CONSTRAINT_TOLERANCE, FREE_PARAMETER_COUNT,
    PARAMETER_COUNT,
};
pub use ik::{closure_residuals, discriminants, inverse_kinematics, limb_vector, BRANCH};
pub use jacobian::{condition_number, ik_jacobian, ik_jacobian_with_step, JACOBIAN_STEP, MAX_CONDITION};
pub use mobility::{mobility, MobilityError, MobilityReport, MobilitySpec};
pub use pose::{normalize_angle, JointVector, PlatformPose};
pub use rotation::{rot_x, rot_y, rot_z, rotation_matrix, RotationMatrix};

/// Limb numbers in these errors are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum KinematicsError {
    #[error("limb {limb} cannot reach its rail (discriminant {discriminant:e})")]
    Unreachable { limb: usize, discriminant: f64 },
    #[error("singular pose (jacobian condition number {condition:e})")]
    SingularPose { condition: f64 },
    #[error("forward kinematics did not converge after {iterations} iterations (residual {residual:e} m)")]
    NoConvergence { iterations: usize, residual: f64 },
}
