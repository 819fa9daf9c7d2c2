use nalgebra::{Matrix3, SymmetricEigen, Vector3, Vector6};

/// Symmetric second-order tensor stored as its six tensor components
/// `(11, 22, 33, 23, 13, 12)`. Shear entries are tensor (not engineering) values.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymTensor2(pub [f64; 6]);

impl SymTensor2 {
    pub const ZERO: SymTensor2 = SymTensor2([0.0; 6]);

    pub fn new(c11: f64, c22: f64, c33: f64, c23: f64, c13: f64, c12: f64) -> Self {
        SymTensor2([c11, c22, c33, c23, c13, c12])
    }

    pub fn diagonal(a: f64, b: f64, c: f64) -> Self {
        SymTensor2([a, b, c, 0.0, 0.0, 0.0])
    }

    pub fn identity() -> Self {
        Self::diagonal(1.0, 1.0, 1.0)
    }

    /// Uses the symmetric part of `m`.
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        let s = |i: usize, j: usize| 0.5 * (m[(i, j)] + m[(j, i)]);
        SymTensor2([m[(0, 0)], m[(1, 1)], m[(2, 2)], s(1, 2), s(0, 2), s(0, 1)])
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        let [a, b, c, d, e, f] = self.0;
        Matrix3::new(a, f, e, f, b, d, e, d, c)
    }

    /// Voigt vector with doubled shear entries (engineering strain convention).
    pub fn engineering(&self) -> Vector6<f64> {
        let [a, b, c, d, e, f] = self.0;
        Vector6::new(a, b, c, 2.0 * d, 2.0 * e, 2.0 * f)
    }

    pub fn from_engineering(v: &Vector6<f64>) -> Self {
        SymTensor2([v[0], v[1], v[2], 0.5 * v[3], 0.5 * v[4], 0.5 * v[5]])
    }

    /// Voigt vector without shear scaling (stress convention).
    pub fn voigt(&self) -> Vector6<f64> {
        Vector6::from_row_slice(&self.0)
    }

    pub fn from_voigt(v: &Vector6<f64>) -> Self {
        SymTensor2([v[0], v[1], v[2], v[3], v[4], v[5]])
    }

    pub fn trace(&self) -> f64 {
        self.0[0] + self.0[1] + self.0[2]
    }

    pub fn determinant(&self) -> f64 {
        self.to_matrix().determinant()
    }

    /// Principal values in ascending order.
    pub fn principal_values(&self) -> Vector3<f64> {
        let eig = SymmetricEigen::new(self.to_matrix());
        let mut v = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2]];
        v.sort_by(|a, b| a.total_cmp(b));
        Vector3::from(v)
    }

    pub fn norm(&self) -> f64 {
        let [a, b, c, d, e, f] = self.0;
        (a * a + b * b + c * c + 2.0 * (d * d + e * e + f * f)).sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        SymTensor2(self.0.map(|x| x * s))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.0;
        for (o, x) in out.iter_mut().zip(other.0) {
            *o += x;
        }
        SymTensor2(out)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}
