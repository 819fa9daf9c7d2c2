use nalgebra::{Matrix6, Vector6};
use std::ops::{Add, Mul, Sub};

use crate::TensorError;

/// Role of a fourth-order tensor, which fixes how shear factors enter its
/// Voigt matrix. With these conventions plain 6×6 matrix products compose
/// correctly, e.g. stiffness × strain-map is a stiffness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TensorKind {
    /// Maps engineering strain to stress (`C_IJ = C_ijkl`).
    Stiffness,
    /// Maps stress to engineering strain.
    Compliance,
    /// Maps engineering strain to engineering strain (Eshelby, concentration tensors).
    StrainMap,
    /// Maps stress to stress.
    StressMap,
}

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Map from Voigt index to tensor index pair.
pub const VOIGT_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)];

pub(crate) fn voigt_index(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (1, 2) => 3,
        (0, 2) => 4,
        _ => 5,
    }
}

fn mandel_scale() -> Vector6<f64> {
    Vector6::new(1.0, 1.0, 1.0, SQRT2, SQRT2, SQRT2)
}

fn shear_weight() -> [f64; 6] {
    [1.0, 1.0, 1.0, 2.0, 2.0, 2.0]
}

/// Full 3×3×3×3 array, indexed `[i][j][k][l]`.
pub type FullTensor4 = [[[[f64; 3]; 3]; 3]; 3];

/// Fourth-order tensor with minor symmetries in Voigt form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tensor4Voigt {
    pub matrix: Matrix6<f64>,
    pub kind: TensorKind,
}

/// Coefficients of the isotropic projection `λ δ_ij δ_kl + μ (δ_ik δ_jl + δ_il δ_jk)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropicParts {
    pub lambda: f64,
    pub mu: f64,
}

impl IsotropicParts {
    pub fn bulk(&self) -> f64 {
        self.lambda + 2.0 * self.mu / 3.0
    }

    pub fn shear(&self) -> f64 {
        self.mu
    }

    pub fn young(&self) -> f64 {
        let (k, g) = (self.bulk(), self.shear());
        9.0 * k * g / (3.0 * k + g)
    }

    pub fn poisson(&self) -> f64 {
        let (k, g) = (self.bulk(), self.shear());
        (3.0 * k - 2.0 * g) / (2.0 * (3.0 * k + g))
    }
}

impl Tensor4Voigt {
    pub fn new(matrix: Matrix6<f64>, kind: TensorKind) -> Self {
        Tensor4Voigt { matrix, kind }
    }

    pub fn zeros(kind: TensorKind) -> Self {
        Tensor4Voigt::new(Matrix6::zeros(), kind)
    }

    /// Identity map on strains or stresses.
    pub fn identity(kind: TensorKind) -> Self {
        let mut m = Matrix6::identity();
        match kind {
            TensorKind::Stiffness => {
                for i in 3..6 {
                    m[(i, i)] = 0.5;
                }
            }
            TensorKind::Compliance => {
                for i in 3..6 {
                    m[(i, i)] = 2.0;
                }
            }
            TensorKind::StrainMap | TensorKind::StressMap => {}
        }
        Tensor4Voigt::new(m, kind)
    }

    /// Isotropic stiffness from Young's modulus and Poisson ratio.
    pub fn isotropic_stiffness(young: f64, poisson: f64) -> Self {
        let lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
        let mu = young / (2.0 * (1.0 + poisson));
        Self::from_lame(lambda, mu, TensorKind::Stiffness)
    }

    pub fn from_lame(lambda: f64, mu: f64, kind: TensorKind) -> Self {
        let mut full = [[[[0.0; 3]; 3]; 3]; 3];
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        for (i, fi) in full.iter_mut().enumerate() {
            for (j, fj) in fi.iter_mut().enumerate() {
                for (k, fk) in fj.iter_mut().enumerate() {
                    for (l, v) in fk.iter_mut().enumerate() {
                        *v = lambda * d(i, j) * d(k, l) + mu * (d(i, k) * d(j, l) + d(i, l) * d(j, k));
                    }
                }
            }
        }
        Self::from_full(&full, kind)
    }

    /// Mandel (orthonormal) representation, in which rotations are orthogonal.
    pub fn to_mandel(&self) -> Matrix6<f64> {
        let w = mandel_scale();
        let mut out = self.matrix;
        for r in 0..6 {
            for c in 0..6 {
                let f = match self.kind {
                    TensorKind::Stiffness => w[r] * w[c],
                    TensorKind::Compliance => 1.0 / (w[r] * w[c]),
                    TensorKind::StrainMap => w[c] / w[r],
                    TensorKind::StressMap => w[r] / w[c],
                };
                out[(r, c)] *= f;
            }
        }
        out
    }

    pub fn from_mandel(m: &Matrix6<f64>, kind: TensorKind) -> Self {
        let w = mandel_scale();
        let mut out = *m;
        for r in 0..6 {
            for c in 0..6 {
                let f = match kind {
                    TensorKind::Stiffness => w[r] * w[c],
                    TensorKind::Compliance => 1.0 / (w[r] * w[c]),
                    TensorKind::StrainMap => w[c] / w[r],
                    TensorKind::StressMap => w[r] / w[c],
                };
                out[(r, c)] /= f;
            }
        }
        Tensor4Voigt::new(out, kind)
    }

    /// Expands to the full index array.
    pub fn to_full(&self) -> FullTensor4 {
        let w = shear_weight();
        let mut full = [[[[0.0; 3]; 3]; 3]; 3];
        for (i, fi) in full.iter_mut().enumerate() {
            for (j, fj) in fi.iter_mut().enumerate() {
                for (k, fk) in fj.iter_mut().enumerate() {
                    for (l, v) in fk.iter_mut().enumerate() {
                        let (a, b) = (voigt_index(i, j), voigt_index(k, l));
                        let x = self.matrix[(a, b)];
                        *v = match self.kind {
                            TensorKind::Stiffness => x,
                            TensorKind::Compliance => x / (w[a] * w[b]),
                            TensorKind::StrainMap => x / w[a],
                            TensorKind::StressMap => x / w[b],
                        };
                    }
                }
            }
        }
        full
    }

    /// Collapses a full array (assumed minor-symmetric) to Voigt form.
    pub fn from_full(full: &FullTensor4, kind: TensorKind) -> Self {
        let w = shear_weight();
        let mut m = Matrix6::zeros();
        for (a, &(i, j)) in VOIGT_PAIRS.iter().enumerate() {
            for (b, &(k, l)) in VOIGT_PAIRS.iter().enumerate() {
                let x = full[i][j][k][l];
                m[(a, b)] = match kind {
                    TensorKind::Stiffness => x,
                    TensorKind::Compliance => x * w[a] * w[b],
                    TensorKind::StrainMap => x * w[a],
                    TensorKind::StressMap => x * w[b],
                };
            }
        }
        Tensor4Voigt::new(m, kind)
    }

    /// Inverse, with the kind mapped to the inverse role.
    pub fn try_inverse(&self) -> Result<Self, TensorError> {
        let inv = self.matrix.try_inverse().ok_or(TensorError::Singular("fourth-order"))?;
        let kind = match self.kind {
            TensorKind::Stiffness => TensorKind::Compliance,
            TensorKind::Compliance => TensorKind::Stiffness,
            k => k,
        };
        Ok(Tensor4Voigt::new(inv, kind))
    }

    /// Frobenius norm of the full index tensor.
    pub fn frobenius(&self) -> f64 {
        self.to_mandel().norm()
    }

    /// Orthogonal projection onto the isotropic subspace.
    pub fn isotropic_projection(&self) -> IsotropicParts {
        let full = self.to_full();
        let mut iijj = 0.0;
        let mut ijij = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                iijj += full[i][i][j][j];
                ijij += full[i][j][i][j];
            }
        }
        // iijj = 9λ + 6μ, ijij = 3λ + 12μ
        let mu = (3.0 * ijij - iijj) / 30.0;
        let lambda = (iijj - 6.0 * mu) / 9.0;
        IsotropicParts { lambda, mu }
    }

    /// Relative Frobenius distance to the isotropic projection.
    pub fn anisotropy(&self) -> f64 {
        let iso = self.isotropic_projection();
        let p = Self::from_lame(iso.lambda, iso.mu, self.kind);
        let n = self.frobenius();
        if n == 0.0 {
            return 0.0;
        }
        (*self - p).frobenius() / n
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        let m = self.to_mandel();
        (m - m.transpose()).norm() <= rel_tol * m.norm()
    }
}

impl Add for Tensor4Voigt {
    type Output = Tensor4Voigt;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.kind, rhs.kind);
        Tensor4Voigt::new(self.matrix + rhs.matrix, self.kind)
    }
}

impl Sub for Tensor4Voigt {
    type Output = Tensor4Voigt;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.kind, rhs.kind);
        Tensor4Voigt::new(self.matrix - rhs.matrix, self.kind)
    }
}

impl Mul<f64> for Tensor4Voigt {
    type Output = Tensor4Voigt;
    fn mul(self, s: f64) -> Self {
        Tensor4Voigt::new(self.matrix * s, self.kind)
    }
}

/// Composition `self : rhs`.
impl Mul for Tensor4Voigt {
    type Output = Tensor4Voigt;
    fn mul(self, rhs: Self) -> Self {
        use TensorKind::*;
        let kind = match (self.kind, rhs.kind) {
            (Stiffness, StrainMap) | (StressMap, Stiffness) => Stiffness,
            (Compliance, StressMap) | (StrainMap, Compliance) => Compliance,
            (StrainMap, StrainMap) | (Compliance, Stiffness) => StrainMap,
            (StressMap, StressMap) | (Stiffness, Compliance) => StressMap,
            (a, b) => panic!("incompatible tensor composition {a:?} : {b:?}"),
        };
        Tensor4Voigt::new(self.matrix * rhs.matrix, kind)
    }
}
