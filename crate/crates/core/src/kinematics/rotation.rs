use nalgebra::{Matrix3, Vector3};

/// Orientation of the platform frame relative to the base frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Matrix3<f64>);

impl RotationMatrix {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn rotate(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }

    /// `max |RᵀR - I|` entrywise.
    pub fn orthonormality_error(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix3::identity()).amax()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }
}

pub fn rot_x(alpha: f64) -> Matrix3<f64> {
    let (s, c) = alpha.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

pub fn rot_y(beta: f64) -> Matrix3<f64> {
    let (s, c) = beta.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

pub fn rot_z(gamma: f64) -> Matrix3<f64> {
    let (s, c) = gamma.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// `R = Rx(alpha) · Ry(beta) · Rz(gamma)`: a vector in the platform frame is
/// turned about Z by gamma first, then about Y by beta, then about X by alpha.
pub fn rotation_matrix(alpha: f64, beta: f64, gamma: f64) -> RotationMatrix {
    RotationMatrix(rot_x(alpha) * rot_y(beta) * rot_z(gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    // Elemental matrices written out as plain arrays and multiplied with
    // explicit loops, independent of nalgebra.
    fn oracle(a: f64, b: f64, g: f64) -> [[f64; 3]; 3] {
        let rx = [
            [1.0, 0.0, 0.0],
            [0.0, a.cos(), -a.sin()],
            [0.0, a.sin(), a.cos()],
        ];
        let ry = [
            [b.cos(), 0.0, b.sin()],
            [0.0, 1.0, 0.0],
            [-b.sin(), 0.0, b.cos()],
        ];
        let rz = [
            [g.cos(), -g.sin(), 0.0],
            [g.sin(), g.cos(), 0.0],
            [0.0, 0.0, 1.0],
        ];
        let mul = |x: [[f64; 3]; 3], y: [[f64; 3]; 3]| {
            let mut out = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        out[i][j] += x[i][k] * y[k][j];
                    }
                }
            }
            out
        };
        mul(mul(rx, ry), rz)
    }

    #[test]
    fn zero_angles_give_identity() {
        assert_eq!(rotation_matrix(0.0, 0.0, 0.0), RotationMatrix::identity());
    }

    #[test]
    fn quarter_turn_about_x() {
        let r = rotation_matrix(FRAC_PI_2, 0.0, 0.0);
        let want = Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0);
        assert!((r.matrix() - want).amax() < 1e-15);
    }

    #[test]
    fn matches_loop_product_and_frozen_values() {
        let r = rotation_matrix(0.1, 0.2, 0.3);
        let o = oracle(0.1, 0.2, 0.3);
        // frozen from an independent numpy evaluation of the same product
        let frozen = [
            [0.9362933635841992, -0.28962947762551555, 0.19866933079506122],
            [0.31299182578546797, 0.9447024859948943, -0.09784339500725571],
            [-0.1593450793079779, 0.1537919979889642, 0.975170327201816],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!((r.matrix()[(i, j)] - o[i][j]).abs() < 1e-14);
                assert!((r.matrix()[(i, j)] - frozen[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn application_order_is_z_then_y_then_x() {
        let (a, b, g) = (0.4, -0.7, 1.1);
        let v = Vector3::new(0.3, -0.2, 0.9);
        let stepwise = rot_x(a) * (rot_y(b) * (rot_z(g) * v));
        assert!((rotation_matrix(a, b, g).rotate(&v) - stepwise).amax() < 1e-15);
    }

    proptest! {
        #[test]
        fn always_orthonormal(a in -10.0..10.0f64, b in -10.0..10.0f64, g in -10.0..10.0f64) {
            let r = rotation_matrix(a, b, g);
            prop_assert!(r.orthonormality_error() < 1e-12);
            prop_assert!((r.determinant() - 1.0).abs() < 1e-12);
        }
    }
}
