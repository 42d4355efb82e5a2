use nalgebra::Vector6;

use super::geometry::MachineGeometry;
use super::ik::inverse_kinematics;
use super::jacobian::ik_jacobian;
use super::pose::{JointVector, PlatformPose};
use super::KinematicsError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FkOptions {
    /// Stop once `‖q_desired - IK(χ)‖∞` drops below this, meters.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Step halvings tried per iteration when a full step does not reduce
    /// the residual.
    pub max_halvings: usize,
}

impl Default for FkOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            max_iterations: 100,
            max_halvings: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FkSolution {
    pub pose: PlatformPose,
    /// Newton updates applied; zero when the guess already satisfies the
    /// tolerance.
    pub iterations: usize,
    /// Final `‖q_desired - IK(pose)‖∞`.
    pub residual: f64,
}

fn inf_norm(v: &Vector6<f64>) -> f64 {
    v.amax()
}

/// Platform pose producing the slider positions `q_desired`, by damped
/// Newton-Raphson on the inverse kinematics starting from `initial_guess`.
///
/// If an iterate leaves the workspace the solve is restarted once from the
/// geometry's home pose; a second exit is reported as `NoConvergence`.
/// `Unreachable` is returned only when the starting pose itself lies outside
/// the workspace and so does home.
pub fn forward_kinematics(
    geom: &MachineGeometry,
    q_desired: &JointVector,
    initial_guess: &PlatformPose,
) -> Result<FkSolution, KinematicsError> {
    forward_kinematics_with(geom, q_desired, initial_guess, &FkOptions::default())
}

pub fn forward_kinematics_with(
    geom: &MachineGeometry,
    q_desired: &JointVector,
    initial_guess: &PlatformPose,
    opts: &FkOptions,
) -> Result<FkSolution, KinematicsError> {
    let first = newton(geom, q_desired, initial_guess, opts);
    let retry = match first {
        Err(Failure::Kinematics(KinematicsError::Unreachable { .. })) | Err(Failure::LeftWorkspace { .. })
            if *initial_guess != geom.home_pose =>
        {
            newton(geom, q_desired, &geom.home_pose, opts)
        }
        other => other,
    };
    retry.map_err(|f| match f {
        Failure::Kinematics(e) => e,
        Failure::LeftWorkspace {
            iterations,
            residual,
        } => KinematicsError::NoConvergence {
            iterations,
            residual,
        },
    })
}

enum Failure {
    Kinematics(KinematicsError),
    /// Every damped trial step of an iteration left the workspace.
    LeftWorkspace { iterations: usize, residual: f64 },
}

impl From<KinematicsError> for Failure {
    fn from(e: KinematicsError) -> Self {
        Failure::Kinematics(e)
    }
}

fn newton(
    geom: &MachineGeometry,
    q_desired: &JointVector,
    start: &PlatformPose,
    opts: &FkOptions,
) -> Result<FkSolution, Failure> {
    let qd = q_desired.to_vector();
    let mut chi = *start;
    let mut err = qd - inverse_kinematics(geom, &chi)?.to_vector();

    for iteration in 0..opts.max_iterations {
        let residual = inf_norm(&err);
        if residual < opts.tolerance {
            return Ok(FkSolution {
                pose: chi,
                iterations: iteration,
                residual,
            });
        }

        let jac = ik_jacobian(geom, &chi)?;
        let delta = jac
            .lu()
            .solve(&err)
            .ok_or(KinematicsError::SingularPose {
                condition: f64::INFINITY,
            })?;

        let base = chi.to_vector();
        let current = err.norm();
        let mut scale = 1.0;
        for halving in 0..=opts.max_halvings {
            let trial = PlatformPose::from_vector(&(base + delta * scale));
            let last = halving == opts.max_halvings;
            match inverse_kinematics(geom, &trial) {
                Ok(q) => {
                    let trial_err = qd - q.to_vector();
                    if trial_err.norm() < current || last {
                        chi = trial;
                        err = trial_err;
                        break;
                    }
                }
                Err(_) if last => {
                    return Err(Failure::LeftWorkspace {
                        iterations: iteration + 1,
                        residual,
                    })
                }
                Err(_) => {}
            }
            scale *= 0.5;
        }
    }

    let residual = inf_norm(&err);
    if residual < opts.tolerance {
        return Ok(FkSolution {
            pose: chi,
            iterations: opts.max_iterations,
            residual,
        });
    }
    Err(KinematicsError::NoConvergence {
        iterations: opts.max_iterations,
        residual,
    }
    .into())
}
