use nalgebra::{Matrix3, Matrix6, Vector3};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::voigt::{Tensor4Voigt, VOIGT_PAIRS};
use crate::TensorError;

/// Orientation of a filler-aligned frame: `gamma1` about the global 3-axis,
/// then `gamma2` tilting the local 3-axis away from the global one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerOrientation {
    gamma1: f64,
    gamma2: f64,
}

impl EulerOrientation {
    pub const IDENTITY: EulerOrientation = EulerOrientation { gamma1: 0.0, gamma2: 0.0 };

    /// Accepts `gamma1 ∈ [0, 2π]` and `gamma2 ∈ [0, π]`; the upper hemisphere
    /// is the usual range, the full sphere is needed for threshold integrals.
    pub fn new(gamma1: f64, gamma2: f64) -> Result<Self, TensorError> {
        if !(0.0..=2.0 * PI).contains(&gamma1) {
            return Err(TensorError::AngleOutOfRange { name: "gamma1", value: gamma1, lo: 0.0, hi: 2.0 * PI });
        }
        if !(0.0..=PI).contains(&gamma2) {
            return Err(TensorError::AngleOutOfRange { name: "gamma2", value: gamma2, lo: 0.0, hi: PI });
        }
        Ok(EulerOrientation { gamma1, gamma2 })
    }

    pub(crate) fn new_unchecked(gamma1: f64, gamma2: f64) -> Self {
        EulerOrientation { gamma1, gamma2 }
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }

    pub fn in_upper_hemisphere(&self) -> bool {
        self.gamma2 <= FRAC_PI_2
    }

    /// `R = Rz(γ1) · Ry(γ2)`; columns are the local axes in global coordinates.
    pub fn matrix(&self) -> Matrix3<f64> {
        let (s1, c1) = self.gamma1.sin_cos();
        let (s2, c2) = self.gamma2.sin_cos();
        let rz = Matrix3::new(c1, -s1, 0.0, s1, c1, 0.0, 0.0, 0.0, 1.0);
        let ry = Matrix3::new(c2, 0.0, s2, 0.0, 1.0, 0.0, -s2, 0.0, c2);
        rz * ry
    }

    /// Global direction of the local 3-axis (the filler axis).
    pub fn axis(&self) -> Vector3<f64> {
        let (s1, c1) = self.gamma1.sin_cos();
        let (s2, c2) = self.gamma2.sin_cos();
        Vector3::new(s2 * c1, s2 * s1, c2)
    }
}

/// Orthogonal 6×6 matrix rotating Mandel vectors: `mandel(R ε Rᵀ) = Q · mandel(ε)`.
pub fn mandel_rotation(r: &Matrix3<f64>) -> Matrix6<f64> {
    let s2 = std::f64::consts::SQRT_2;
    let mut q = Matrix6::zeros();
    for (b, &(k, l)) in VOIGT_PAIRS.iter().enumerate() {
        let mut e = Matrix3::zeros();
        if k == l {
            e[(k, l)] = 1.0;
        } else {
            e[(k, l)] = 1.0 / s2;
            e[(l, k)] = 1.0 / s2;
        }
        let re = r * e * r.transpose();
        for (a, &(i, j)) in VOIGT_PAIRS.iter().enumerate() {
            q[(a, b)] = if i == j { re[(i, j)] } else { s2 * re[(i, j)] };
        }
    }
    q
}

/// Expresses a tensor given in the local frame of `o` in the global frame.
pub fn rotate_tensor4(t: &Tensor4Voigt, o: &EulerOrientation) -> Tensor4Voigt {
    rotate_tensor4_by(t, &mandel_rotation(&o.matrix()))
}

/// Same as [`rotate_tensor4`] with a precomputed Mandel rotation.
pub fn rotate_tensor4_by(t: &Tensor4Voigt, q: &Matrix6<f64>) -> Tensor4Voigt {
    let m = q * t.to_mandel() * q.transpose();
    Tensor4Voigt::from_mandel(&m, t.kind)
}

/// Rotates a second-order tensor from the local frame to the global frame.
pub fn rotate_matrix3(t: &Matrix3<f64>, o: &EulerOrientation) -> Matrix3<f64> {
    let r = o.matrix();
    r * t * r.transpose()
}
