use nalgebra::{DMatrix, Matrix3, Matrix6};
use serde::{Deserialize, Serialize};
use tensorlab::SymTensor2;

use elastic_homog::{effective_stiffness, CompositeSpec};
use electro_homog::{piezoresistivity_coeffs, resistivity_update};

use crate::degradation::{ConductivityDegradation, DEFAULT_REGULARIZATION};
use crate::SolverError;

/// Largest Frobenius norm of the relative resistivity change fed to the
/// linear piezoresistive law; beyond it the strain is scaled down so that the
/// resistivity stays positive definite.
pub const PIEZO_SATURATION: f64 = 0.5;

/// Linear piezoresistivity coefficients; `None` in [`MaterialPoint`] means a
/// strain-independent conductivity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piezo {
    pub lambda11: f64,
    pub lambda12: f64,
}

/// Constitutive data shared by every integration point.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialPoint {
    /// Stiffness in Voigt form with engineering shear (Pa).
    pub c_eff: Matrix6<f64>,
    /// Critical energy release rate (J/m²).
    pub g_c: f64,
    /// Phase-field length scale (m).
    pub ell: f64,
    /// Unstrained resistivity (Ω·m).
    pub rho0: f64,
    pub piezo: Option<Piezo>,
    pub degradation: ConductivityDegradation,
    pub eps_reg: f64,
}

impl MaterialPoint {
    /// Homogenised properties of `spec` with length scale `ell`.
    pub fn from_spec(spec: &CompositeSpec, ell: f64, degradation: ConductivityDegradation) -> Result<Self, SolverError> {
        let el = effective_stiffness(spec)?;
        let pz = piezoresistivity_coeffs(spec)?;
        let m = MaterialPoint {
            c_eff: el.c_eff.matrix,
            g_c: el.g_c,
            ell,
            rho0: pz.rho0,
            piezo: Some(Piezo { lambda11: pz.lambda11, lambda12: pz.lambda12 }),
            degradation,
            eps_reg: DEFAULT_REGULARIZATION,
        };
        m.validate()?;
        Ok(m)
    }

    /// Isotropic material without homogenisation, for tests and user input.
    pub fn isotropic(young: f64, poisson: f64, g_c: f64, ell: f64, rho0: f64) -> Self {
        MaterialPoint {
            c_eff: tensorlab::Tensor4Voigt::isotropic_stiffness(young, poisson).matrix,
            g_c,
            ell,
            rho0,
            piezo: None,
            degradation: ConductivityDegradation::default(),
            eps_reg: DEFAULT_REGULARIZATION,
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |what: &str, v: f64| Err(SolverError::InvalidInput(format!("{what} = {v}")));
        if !(self.ell > 0.0) {
            return bad("length scale", self.ell);
        }
        if !(self.g_c > 0.0) {
            return bad("fracture energy", self.g_c);
        }
        if !(self.rho0 > 0.0 && self.rho0.is_finite()) {
            return bad("resistivity", self.rho0);
        }
        if !(self.degradation.k > 0.0) {
            return bad("degradation k", self.degradation.k);
        }
        if !(self.degradation.n >= 1.0) {
            return bad("degradation n", self.degradation.n);
        }
        if !(self.eps_reg > 0.0 && self.eps_reg < 1e-2) {
            return bad("regularisation", self.eps_reg);
        }
        if self.c_eff.cholesky().is_none() {
            return Err(SolverError::InvalidInput("stiffness is not positive definite".into()));
        }
        Ok(())
    }

    /// Stress–strain matrix: plane stress (3×3, condensed on the out-of-plane
    /// stresses) for `dim = 2`, the full Voigt matrix for `dim = 3`.
    pub fn elasticity(&self, dim: usize) -> DMatrix<f64> {
        if dim == 3 {
            return DMatrix::from_fn(6, 6, |i, j| self.c_eff[(i, j)]);
        }
        let keep = [0, 1, 5];
        let drop = [2, 3, 4];
        let a = DMatrix::from_fn(3, 3, |i, j| self.c_eff[(keep[i], keep[j])]);
        let b = DMatrix::from_fn(3, 3, |i, j| self.c_eff[(keep[i], drop[j])]);
        let c = DMatrix::from_fn(3, 3, |i, j| self.c_eff[(drop[i], drop[j])]);
        let c_inv = c.try_inverse().expect("positive definite stiffness");
        let d = &a - &b * c_inv * b.transpose();
        (&d + d.transpose()) * 0.5
    }

    /// Young's modulus of the in-plane or bulk response, for scaling.
    pub fn young(&self) -> f64 {
        let s = self.c_eff.try_inverse().expect("positive definite stiffness");
        1.0 / s[(0, 0)]
    }

    /// Undegraded conductivity at strain `eps` (Voigt, engineering shear),
    /// restricted to the first `dim` axes. Plane strains carry no
    /// out-of-plane components.
    pub fn conductivity(&self, eps: &[f64], dim: usize) -> Result<DMatrix<f64>, SolverError> {
        let sigma = match self.piezo {
            None => Matrix3::identity() / self.rho0,
            Some(p) => {
                let e = if dim == 2 { [eps[0], eps[1], 0.0, 0.0, 0.0, eps[2]] } else { [eps[0], eps[1], eps[2], eps[3], eps[4], eps[5]] };
                let mut strain = SymTensor2::new(e[0], e[1], e[2], 0.5 * e[3], 0.5 * e[4], 0.5 * e[5]);
                // the law is linear, so probe it with a small multiple of the strain
                let t = 1e-3 / strain.norm().max(1e-300);
                let change = (resistivity_update(1.0, p.lambda11, p.lambda12, &strain.scale(t))? - Matrix3::identity()).norm() / t;
                if change > PIEZO_SATURATION {
                    strain = strain.scale(PIEZO_SATURATION / change);
                }
                let rho = resistivity_update(self.rho0, p.lambda11, p.lambda12, &strain)?;
                rho.try_inverse().ok_or(SolverError::InvalidInput("singular resistivity".into()))?
            }
        };
        Ok(DMatrix::from_fn(dim, dim, |i, j| sigma[(i, j)]))
    }
}
