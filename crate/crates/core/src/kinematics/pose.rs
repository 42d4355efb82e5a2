use std::f64::consts::PI;
use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::{Vector3, Vector6};

use super::rotation::{rotation_matrix, RotationMatrix};

/// Wraps an angle into (-pi, pi]. Angles already inside the interval are
/// returned unchanged, bit for bit.
pub fn normalize_angle(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let two_pi = 2.0 * PI;
    let mut w = a - two_pi * ((a + PI) / two_pi).floor();
    if w <= -PI {
        w += two_pi;
    }
    if w > PI {
        w -= two_pi;
    }
    w
}

/// Position and orientation of the moving platform in the base frame.
///
/// The position is the origin of the platform frame in meters. The
/// orientation is `(alpha, beta, gamma)`, rotations about the base X, Y and Z
/// axes in radians, always stored wrapped into (-pi, pi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlatformPose {
    position: Vector3<f64>,
    angles: [f64; 3],
}

impl PlatformPose {
    pub fn new(position: Vector3<f64>, angles: [f64; 3]) -> Self {
        Self {
            position,
            angles: angles.map(normalize_angle),
        }
    }

    /// `[px, py, pz, alpha, beta, gamma]`.
    pub fn from_array(chi: [f64; 6]) -> Self {
        Self::new(
            Vector3::new(chi[0], chi[1], chi[2]),
            [chi[3], chi[4], chi[5]],
        )
    }

    pub fn from_vector(chi: &Vector6<f64>) -> Self {
        Self::from_array([chi[0], chi[1], chi[2], chi[3], chi[4], chi[5]])
    }

    pub fn identity() -> Self {
        Self::new(Vector3::zeros(), [0.0; 3])
    }

    pub fn position(&self) -> Vector3<f64> {
        self.position
    }

    pub fn angles(&self) -> [f64; 3] {
        self.angles
    }

    pub fn to_array(&self) -> [f64; 6] {
        let p = &self.position;
        let [a, b, g] = self.angles;
        [p.x, p.y, p.z, a, b, g]
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::from(self.to_array())
    }

    pub fn rotation(&self) -> RotationMatrix {
        let [a, b, g] = self.angles;
        rotation_matrix(a, b, g)
    }

    /// Largest absolute component difference, mixing meters and radians.
    pub fn max_component_diff(&self, other: &PlatformPose) -> f64 {
        let a = self.to_array();
        let b = other.to_array();
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

impl Default for PlatformPose {
    fn default() -> Self {
        Self::identity()
    }
}

impl fmt::Display for PlatformPose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.to_array();
        write!(
            f,
            "({:.6}, {:.6}, {:.6}, {:.6}, {:.6}, {:.6})",
            c[0], c[1], c[2], c[3], c[4], c[5]
        )
    }
}

/// Slider displacements along the rails, meters, measured from each rail
/// anchor in the +X direction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JointVector(pub [f64; 6]);

impl JointVector {
    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::from(self.0)
    }

    pub fn from_vector(v: &Vector6<f64>) -> Self {
        Self([v[0], v[1], v[2], v[3], v[4], v[5]])
    }

    pub fn max_abs_diff(&self, other: &JointVector) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for JointVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for JointVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_angles_pass_through_untouched() {
        for a in [0.0, 0.1, -0.3, PI, -PI + 1e-12, 3.0] {
            assert_eq!(normalize_angle(a).to_bits(), a.to_bits());
        }
    }

    #[test]
    fn wraps_into_half_open_interval() {
        assert_eq!(normalize_angle(-PI), PI);
        assert!((normalize_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((normalize_angle(2.0 * PI + 0.25) - 0.25).abs() < 1e-12);
        assert!((normalize_angle(-2.0 * PI - 0.25) + 0.25).abs() < 1e-12);
        for k in -20..20 {
            let w = normalize_angle(0.37 * k as f64);
            assert!(w > -PI && w <= PI);
        }
    }

    #[test]
    fn pose_array_round_trip() {
        let chi = [0.1, -0.2, 0.3, 0.01, -0.02, 0.03];
        assert_eq!(PlatformPose::from_array(chi).to_array(), chi);
    }
}
