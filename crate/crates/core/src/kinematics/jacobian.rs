use nalgebra::Matrix6;

use super::geometry::MachineGeometry;
use super::ik::inverse_kinematics;
use super::pose::PlatformPose;
use super::KinematicsError;

/// Central-difference step: meters for position, radians for angles.
pub const JACOBIAN_STEP: f64 = 1e-6;

/// Poses whose Jacobian condition number exceeds this are rejected.
pub const MAX_CONDITION: f64 = 1e8;

/// `∂q/∂χ` by central differences of the inverse kinematics, without the
/// conditioning check.
pub fn ik_jacobian_with_step(
    geom: &MachineGeometry,
    pose: &PlatformPose,
    step: f64,
) -> Result<Matrix6<f64>, KinematicsError> {
    let chi = pose.to_array();
    let mut jac = Matrix6::zeros();
    for k in 0..6 {
        let mut fwd = chi;
        let mut back = chi;
        fwd[k] += step;
        back[k] -= step;
        let qf = inverse_kinematics(geom, &PlatformPose::from_array(fwd))?;
        let qb = inverse_kinematics(geom, &PlatformPose::from_array(back))?;
        for i in 0..6 {
            jac[(i, k)] = (qf[i] - qb[i]) / (2.0 * step);
        }
    }
    Ok(jac)
}

/// Ratio of extreme singular values; infinite for a rank-deficient matrix.
pub fn condition_number(m: &Matrix6<f64>) -> f64 {
    let sv = m.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Slider-rate Jacobian `∂q/∂χ` at `pose`.
pub fn ik_jacobian(geom: &MachineGeometry, pose: &PlatformPose) -> Result<Matrix6<f64>, KinematicsError> {
    let jac = ik_jacobian_with_step(geom, pose, JACOBIAN_STEP)?;
    let condition = condition_number(&jac);
    if condition.is_nan() || condition > MAX_CONDITION {
        return Err(KinematicsError::SingularPose { condition });
    }
    Ok(jac)
}
