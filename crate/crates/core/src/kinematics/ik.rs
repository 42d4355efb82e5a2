use nalgebra::Vector3;

use super::geometry::MachineGeometry;
use super::pose::{JointVector, PlatformPose};
use super::rotation::RotationMatrix;
use super::KinematicsError;

/// Assembly-mode branch per limb: sliders 1..3 sit behind their arm
/// (`-1`), sliders 4..6 in front of it (`+1`).
pub const BRANCH: [f64; 6] = [-1.0, -1.0, -1.0, 1.0, 1.0, 1.0];

fn closure(geom: &MachineGeometry, pose: &PlatformPose, rot: &RotationMatrix, i: usize) -> Vector3<f64> {
    pose.position() + rot.rotate(&geom.platform_joint[i]) - geom.rail_anchor[i]
}

// (l - r)(l + r) instead of l² - y² - z²: exact zero on the boundary of
// Pythagorean configurations, less cancellation near it.
fn discriminant(l: f64, b: &Vector3<f64>) -> f64 {
    let r = b.y.hypot(b.z);
    (l - r) * (l + r)
}

/// `P + R·B_i - S_i`: the vector from rail anchor `i` to its platform joint.
/// `limb` is 0-based.
pub fn limb_vector(geom: &MachineGeometry, pose: &PlatformPose, limb: usize) -> Vector3<f64> {
    closure(geom, pose, &pose.rotation(), limb)
}

/// `l_i² - b_iy² - b_iz²` for every limb. Negative means the arm cannot
/// reach the rail.
pub fn discriminants(geom: &MachineGeometry, pose: &PlatformPose) -> [f64; 6] {
    let rot = pose.rotation();
    std::array::from_fn(|i| {
        let b = closure(geom, pose, &rot, i);
        discriminant(geom.arm_length[i], &b)
    })
}

/// Closed-form slider positions for a platform pose.
///
/// A zero discriminant (arm perpendicular to its rail) is accepted.
pub fn inverse_kinematics(geom: &MachineGeometry, pose: &PlatformPose) -> Result<JointVector, KinematicsError> {
    let rot = pose.rotation();
    let mut q = [0.0; 6];
    for (i, qi) in q.iter_mut().enumerate() {
        let b = closure(geom, pose, &rot, i);
        let disc = discriminant(geom.arm_length[i], &b);
        if disc.is_nan() || disc < 0.0 {
            return Err(KinematicsError::Unreachable {
                limb: i + 1,
                discriminant: disc,
            });
        }
        *qi = b.x + BRANCH[i] * disc.sqrt();
    }
    Ok(JointVector(q))
}

/// `‖P + R·B_i - q_i·x̂ - S_i‖ - l_i` per limb.
pub fn closure_residuals(geom: &MachineGeometry, pose: &PlatformPose, q: &JointVector) -> [f64; 6] {
    let rot = pose.rotation();
    std::array::from_fn(|i| {
        let mut b = closure(geom, pose, &rot, i);
        b.x -= q[i];
        b.norm() - geom.arm_length[i]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::pose::PlatformPose;
    use proptest::prelude::*;

    fn single_limb(l: f64) -> MachineGeometry {
        MachineGeometry::new(
            [Vector3::zeros(); 6],
            [Vector3::zeros(); 6],
            [l; 6],
            [(-1.0, 1.0); 6],
            PlatformPose::identity(),
        )
        .unwrap()
    }

    fn pose(p: [f64; 3]) -> PlatformPose {
        PlatformPose::new(Vector3::from(p), [0.0; 3])
    }

    // Solve ‖closure(q)‖ = l on the branch side by plain bisection.
    fn bisection_oracle(geom: &MachineGeometry, pose: &PlatformPose) -> [f64; 6] {
        let r = pose.rotation().matrix().clone_owned();
        std::array::from_fn(|i| {
            let b = pose.position() + r * geom.platform_joint[i] - geom.rail_anchor[i];
            let l = geom.arm_length[i];
            let f = |q: f64| ((b.x - q).powi(2) + b.y * b.y + b.z * b.z).sqrt() - l;
            let (mut near, mut far) = (b.x, b.x + BRANCH[i] * l);
            for _ in 0..200 {
                let mid = 0.5 * (near + far);
                if f(mid) > 0.0 {
                    far = mid;
                } else {
                    near = mid;
                }
            }
            0.5 * (near + far)
        })
    }

    #[test]
    fn limb_vector_with_zero_offsets_is_position() {
        let g = single_limb(0.5);
        let b = limb_vector(&g, &pose([0.0, 0.3, 0.4]), 0);
        assert_eq!(b, Vector3::new(0.0, 0.3, 0.4));
    }

    #[test]
    fn limb_vector_collapses_when_platform_sits_on_anchor() {
        let mut g = MachineGeometry::reference();
        g.platform_joint = [Vector3::zeros(); 6];
        for i in 0..6 {
            let p = PlatformPose::new(g.rail_anchor[i], [0.0; 3]);
            assert_eq!(limb_vector(&g, &p, i), Vector3::zeros());
        }
    }

    #[test]
    fn zero_discriminant_three_four_five() {
        let g = single_limb(0.5);
        let p = pose([0.0, 0.3, 0.4]);
        let d = discriminants(&g, &p);
        assert_eq!(d[0], 0.0);
        let q = inverse_kinematics(&g, &p).unwrap();
        for v in q.0 {
            assert!(v.abs() < 1e-15, "{v}");
        }
    }

    #[test]
    fn explicit_branch_sign() {
        let g = single_limb(0.5);
        let q = inverse_kinematics(&g, &pose([0.1, 0.3, 0.0])).unwrap();
        assert!((q[1] - (-0.3)).abs() < 1e-15);
        assert!((q[4] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn negative_discriminant_is_unreachable() {
        let g = single_limb(0.5);
        match inverse_kinematics(&g, &pose([0.0, 0.6, 0.0])) {
            Err(KinematicsError::Unreachable { limb, discriminant }) => {
                assert_eq!(limb, 1);
                assert!((discriminant - (0.25 - 0.36)).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reference_home_matches_bisection_and_frozen_values() {
        let g = MachineGeometry::reference();
        let q = inverse_kinematics(&g, &g.home_pose).unwrap();
        let oracle = bisection_oracle(&g, &g.home_pose);
        // frozen from an independent numpy evaluation
        let frozen = [
            -0.33124722220850467,
            -0.3570714214271425,
            -0.3583828789021855,
            0.33124722220850467,
            0.3570714214271425,
            0.3583828789021855,
        ];
        for i in 0..6 {
            assert!((q[i] - oracle[i]).abs() < 1e-9);
            assert!((q[i] - frozen[i]).abs() < 1e-15);
        }
    }

    fn box_pose() -> impl Strategy<Value = PlatformPose> {
        (
            -0.05..0.05f64,
            -0.05..0.05f64,
            0.32..0.38f64,
            -0.1..0.1f64,
            -0.1..0.1f64,
            -0.1..0.1f64,
        )
            .prop_map(|(x, y, z, a, b, c)| PlatformPose::from_array([x, y, z, a, b, c]))
    }

    proptest! {
        #[test]
        fn closure_residual_and_branch(p in box_pose()) {
            let g = MachineGeometry::reference();
            let q = inverse_kinematics(&g, &p).unwrap();
            for r in closure_residuals(&g, &p, &q) {
                prop_assert!(r.abs() < 1e-9);
            }
            let oracle = bisection_oracle(&g, &p);
            for i in 0..6 {
                let bx = limb_vector(&g, &p, i).x;
                if i < 3 {
                    prop_assert!(q[i] <= bx);
                } else {
                    prop_assert!(q[i] >= bx);
                }
                prop_assert!((q[i] - oracle[i]).abs() < 1e-9);
            }
        }

        #[test]
        fn limb_vector_matches_hand_assembly(p in box_pose(), i in 0usize..6) {
            let g = MachineGeometry::reference();
            let r = crate::kinematics::rotation_matrix(p.angles()[0], p.angles()[1], p.angles()[2]);
            let m = r.matrix();
            let bj = g.platform_joint[i];
            let mut want = [0.0; 3];
            for row in 0..3 {
                want[row] = p.position()[row] + m[(row, 0)] * bj.x + m[(row, 1)] * bj.y + m[(row, 2)] * bj.z
                    - g.rail_anchor[i][row];
            }
            let got = limb_vector(&g, &p, i);
            for row in 0..3 {
                prop_assert!((got[row] - want[row]).abs() < 1e-15);
            }
        }

        #[test]
        fn deterministic(p in box_pose()) {
            let g = MachineGeometry::reference();
            let a = inverse_kinematics(&g, &p).unwrap();
            let b = inverse_kinematics(&g, &p).unwrap();
            for i in 0..6 {
                prop_assert_eq!(a[i].to_bits(), b[i].to_bits());
            }
        }
    }
}
