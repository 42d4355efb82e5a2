use nalgebra::Vector3;

use super::{PlannerConfig, DEGENERATE_LENGTH};
use crate::gcode::{ArcSense, MotionCommand, MotionKind};
use crate::kinematics::{normalize_angle, PlatformPose};

/// Poses along one command, start and target included.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpolation {
    pub poses: Vec<PlatformPose>,
    /// The command does not move the platform; `poses` holds only the start.
    pub degenerate: bool,
}

impl Interpolation {
    fn degenerate(start: PlatformPose) -> Self {
        Self {
            poses: vec![start],
            degenerate: true,
        }
    }
}

/// Shortest signed angle from `a` to `b`.
pub(crate) fn angle_delta(a: f64, b: f64) -> f64 {
    normalize_angle(b - a)
}

/// Pose a fraction `u` of the way from `a` to `b`: positions linearly,
/// angles linearly along the shorter way round.
pub(crate) fn lerp_pose(a: &PlatformPose, b: &PlatformPose, u: f64) -> PlatformPose {
    let pa = a.position();
    let pb = b.position();
    let aa = a.angles();
    let ab = b.angles();
    PlatformPose::new(
        pa + (pb - pa) * u,
        std::array::from_fn(|k| aa[k] + angle_delta(aa[k], ab[k]) * u),
    )
}

/// Angular distance between two orientations, radians.
pub(crate) fn angular_distance(a: &PlatformPose, b: &PlatformPose) -> f64 {
    let aa = a.angles();
    let ab = b.angles();
    (0..3)
        .map(|k| angle_delta(aa[k], ab[k]).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Segments needed so a chord of an arc of radius `r` stays within `tol` of it.
pub(crate) fn arc_segments(sweep: f64, r: f64, tol: f64) -> usize {
    let max_angle = 2.0 * (1.0 - tol / r).max(-1.0).acos();
    ((sweep / max_angle).ceil() as usize).max(1)
}

/// Subdivides `command`, starting from `start`, into poses no farther apart
/// than the planner limits allow.
pub fn interpolate(command: &MotionCommand, start: &PlatformPose, cfg: &PlannerConfig) -> Interpolation {
    let target = command.target;
    match command.kind {
        MotionKind::Rapid | MotionKind::Linear => {
            let length = (target.position() - start.position()).norm();
            let length = if length > DEGENERATE_LENGTH {
                length
            } else {
                cfg.characteristic_radius * angular_distance(start, &target)
            };
            if length <= DEGENERATE_LENGTH {
                return Interpolation::degenerate(*start);
            }
            // the relative slack keeps exact multiples of the step from
            // gaining a segment to rounding
            let n = ((length / cfg.max_cartesian_step) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
            let mut poses: Vec<_> = (0..n).map(|k| lerp_pose(start, &target, k as f64 / n as f64)).collect();
            poses.push(target);
            Interpolation {
                poses,
                degenerate: false,
            }
        }
        MotionKind::Arc { center, sense, sweep } => {
            if sweep <= DEGENERATE_LENGTH {
                return Interpolation::degenerate(*start);
            }
            let p0 = start.position();
            let p1 = target.position();
            let r0 = (p0.xy() - center.xy()).norm();
            let r1 = (p1.xy() - center.xy()).norm();
            let n = arc_segments(sweep, r0.max(r1), cfg.arc_chord_tolerance);
            let theta0 = (p0.y - center.y).atan2(p0.x - center.x);
            let signed = match sense {
                ArcSense::Ccw => sweep,
                ArcSense::Cw => -sweep,
            };
            let a0 = start.angles();
            let a1 = target.angles();
            let mut poses: Vec<_> = (0..n)
                .map(|k| {
                    let u = k as f64 / n as f64;
                    if k == 0 {
                        return *start;
                    }
                    let theta = theta0 + signed * u;
                    let r = r0 + (r1 - r0) * u;
                    let position = Vector3::new(
                        center.x + r * theta.cos(),
                        center.y + r * theta.sin(),
                        p0.z + (p1.z - p0.z) * u,
                    );
                    PlatformPose::new(
                        position,
                        std::array::from_fn(|j| a0[j] + angle_delta(a0[j], a1[j]) * u),
                    )
                })
                .collect();
            poses.push(target);
            Interpolation {
                poses,
                degenerate: false,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    fn at(x: f64, y: f64, z: f64) -> PlatformPose {
        PlatformPose::from_array([x, y, z, 0.0, 0.0, 0.0])
    }

    fn linear(target: PlatformPose) -> MotionCommand {
        MotionCommand {
            kind: MotionKind::Linear,
            target,
            feed: Some(0.001),
            source_line: 1,
        }
    }

    fn full_circle(r: f64) -> MotionCommand {
        MotionCommand {
            kind: MotionKind::Arc {
                center: Vector3::new(-r, 0.0, 0.0),
                sense: ArcSense::Ccw,
                sweep: TAU,
            },
            target: at(0.0, 0.0, 0.0),
            feed: Some(0.001),
            source_line: 1,
        }
    }

    /// Largest distance from the arc to its chords, found by sampling each
    /// chord densely and measuring the radial gap.
    fn dense_chord_deviation(poses: &[PlatformPose], center: Vector3<f64>, r: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for w in poses.windows(2) {
            let a = w[0].position();
            let b = w[1].position();
            for k in 0..=10_000 {
                let p = a + (b - a) * (k as f64 / 10_000.0);
                worst = worst.max((r - (p.xy() - center.xy()).norm()).abs());
            }
        }
        worst
    }

    #[test]
    fn one_millimeter_line_in_tenth_millimeter_steps() {
        let cfg = PlannerConfig::default();
        let out = interpolate(&linear(at(0.001, 0.0, 0.0)), &at(0.0, 0.0, 0.0), &cfg);
        assert!(!out.degenerate);
        assert_eq!(out.poses.len(), 11);
        for (k, w) in out.poses.windows(2).enumerate() {
            let d = (w[1].position() - w[0].position()).norm();
            assert!((d - 1e-4).abs() < 1e-15, "step {k}: {d}");
        }
        assert_eq!(out.poses[10], at(0.001, 0.0, 0.0));
    }

    #[test]
    fn full_circle_segment_count_and_deviation() {
        let r = 0.005;
        let cfg = PlannerConfig {
            arc_chord_tolerance: 1e-5,
            ..PlannerConfig::default()
        };
        let cmd = full_circle(r);
        let out = interpolate(&cmd, &at(0.0, 0.0, 0.0), &cfg);
        assert_eq!(out.poses.len(), 51);
        let deviation = dense_chord_deviation(&out.poses, Vector3::new(-r, 0.0, 0.0), r);
        assert!(deviation <= 1e-5, "{deviation}");
        // one segment fewer would break the tolerance
        let chord_angle = TAU / 49.0;
        assert!(r * (1.0 - (chord_angle / 2.0).cos()) > 1e-5);
    }

    #[test]
    fn zero_sweep_and_zero_length_are_degenerate() {
        let cfg = PlannerConfig::default();
        let start = at(0.01, 0.0, 0.3);
        let out = interpolate(&linear(start), &start, &cfg);
        assert!(out.degenerate);
        assert_eq!(out.poses, vec![start]);
        let arc = MotionCommand {
            kind: MotionKind::Arc {
                center: Vector3::zeros(),
                sense: ArcSense::Cw,
                sweep: 0.0,
            },
            ..linear(start)
        };
        let out = interpolate(&arc, &start, &cfg);
        assert!(out.degenerate);
        assert_eq!(out.poses.len(), 1);
    }

    #[test]
    fn rotation_only_move_uses_characteristic_radius() {
        let cfg = PlannerConfig::default();
        let start = at(0.0, 0.0, 0.3);
        let target = PlatformPose::from_array([0.0, 0.0, 0.3, 0.0, 0.0, 0.01]);
        let out = interpolate(&linear(target), &start, &cfg);
        // 0.01 rad at 0.1 m is 1 mm of equivalent travel
        assert_eq!(out.poses.len(), 11);
        assert_eq!(*out.poses.last().unwrap(), target);
    }

    #[test]
    fn angles_take_the_short_way_round() {
        let cfg = PlannerConfig::default();
        let start = PlatformPose::from_array([0.0, 0.0, 0.3, 0.0, 0.0, 3.1]);
        let target = PlatformPose::from_array([0.001, 0.0, 0.3, 0.0, 0.0, -3.1]);
        let out = interpolate(&linear(target), &start, &cfg);
        for p in &out.poses {
            assert!(p.angles()[2].abs() >= 3.1 - 1e-12);
        }
    }

    proptest! {
        #[test]
        fn linear_samples_lie_on_the_segment_within_the_step(
            a in prop::array::uniform3(-0.05f64..0.05),
            b in prop::array::uniform3(-0.05f64..0.05),
            step in 1e-4f64..5e-3,
        ) {
            let cfg = PlannerConfig { max_cartesian_step: step, ..PlannerConfig::default() };
            let s = at(a[0], a[1], a[2]);
            let t = at(b[0], b[1], b[2]);
            let out = interpolate(&linear(t), &s, &cfg);
            let d = t.position() - s.position();
            let len = d.norm();
            prop_assume!(len > 1e-9);
            let dir = d / len;
            for w in out.poses.windows(2) {
                prop_assert!((w[1].position() - w[0].position()).norm() <= step * (1.0 + 1e-9));
            }
            for p in &out.poses {
                let v = p.position() - s.position();
                prop_assert!((v - dir * v.dot(&dir)).norm() < 1e-12);
            }
            prop_assert_eq!(out.poses.first().copied(), Some(s));
            prop_assert_eq!(out.poses.last().copied(), Some(t));
        }

        #[test]
        fn arc_chords_respect_tolerance(
            r in 1e-3f64..0.05,
            sweep in 0.1f64..TAU,
            tol in 1e-6f64..1e-4,
        ) {
            let cfg = PlannerConfig { arc_chord_tolerance: tol, ..PlannerConfig::default() };
            let center = Vector3::new(0.0, 0.0, 0.0);
            let start = at(r, 0.0, 0.0);
            let target = at(r * sweep.cos(), r * sweep.sin(), 0.0);
            let cmd = MotionCommand {
                kind: MotionKind::Arc { center, sense: ArcSense::Ccw, sweep },
                ..linear(target)
            };
            let out = interpolate(&cmd, &start, &cfg);
            let n = out.poses.len() - 1;
            let sagitta = r * (1.0 - (sweep / n as f64 / 2.0).cos());
            prop_assert!(sagitta <= tol * (1.0 + 1e-9));
            for p in &out.poses {
                prop_assert!(((p.position().xy() - center.xy()).norm() - r).abs() < 1e-12);
            }
        }
    }
}
