use nalgebra::Matrix3;
use tensorlab::SymTensor2;

use elastic_homog::CompositeSpec;

use crate::conductivity::{effective_conductivity, ElectroOptions};
use crate::percolation::ThresholdQuadrature;
use crate::ElectroError;

/// Default strain step of the finite differences.
pub const DEFAULT_STEP: f64 = 1e-5;
/// Largest relative change tolerated between step `δ` and `δ/2`.
const RICHARDSON_TOLERANCE: f64 = 0.01;

/// Unstrained resistivity and linear isotropic piezoresistivity coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiezoCoefficients {
    /// Unstrained resistivity (Ω·m).
    pub rho0: f64,
    pub lambda11: f64,
    pub lambda12: f64,
    /// Shear coefficient obtained from a shear strain.
    pub lambda44: f64,
}

impl PiezoCoefficients {
    pub fn resistivity(&self, eps: &SymTensor2) -> Result<Matrix3<f64>, ElectroError> {
        resistivity_update(self.rho0, self.lambda11, self.lambda12, eps)
    }

    /// Conductivity of the linearised law, the inverse of [`Self::resistivity`].
    pub fn conductivity(&self, eps: &SymTensor2) -> Result<Matrix3<f64>, ElectroError> {
        self.resistivity(eps)?.try_inverse().ok_or(ElectroError::Singular("linearised resistivity"))
    }
}

/// Linearised resistivity `ρ0 (I + Π ε)` for an isotropic piezoresistivity
/// tensor with shear coefficient `(λ11 − λ12)/2`.
pub fn resistivity_update(rho0: f64, lambda11: f64, lambda12: f64, eps: &SymTensor2) -> Result<Matrix3<f64>, ElectroError> {
    if !(rho0.is_finite() && rho0 > 0.0) {
        return Err(ElectroError::Domain(format!("resistivity {rho0}")));
    }
    let e = eps.engineering();
    let shear = 0.5 * (lambda11 - lambda12);
    let normal = |i: usize| lambda11 * e[i] + lambda12 * (e[0] + e[1] + e[2] - e[i]);
    let r = Matrix3::new(
        normal(0),
        shear * e[5],
        shear * e[4],
        shear * e[5],
        normal(1),
        shear * e[3],
        shear * e[4],
        shear * e[3],
        normal(2),
    );
    let m = Matrix3::identity() + r;
    if m.cholesky().is_none() {
        return Err(ElectroError::Singular("resistivity update at extreme strain"));
    }
    Ok(m * rho0)
}

fn options() -> ElectroOptions {
    // one fixed threshold rule so that the quadrature error cancels between
    // the perturbed states
    ElectroOptions { threshold: Some(ThresholdQuadrature::default()), ..ElectroOptions::default() }
}

fn resistivity_at(spec: &CompositeSpec, eps: &SymTensor2, opts: &ElectroOptions) -> Result<Matrix3<f64>, ElectroError> {
    effective_conductivity(spec, eps, opts)?.resistivity()
}

/// Central difference of the normalised resistivity entries `(a, b)` along
/// the strain direction `dir`, per unit of the engineering strain.
fn central(
    spec: &CompositeSpec,
    opts: &ElectroOptions,
    dir: &SymTensor2,
    step: f64,
    rho0: f64,
    entries: &[(usize, usize)],
) -> Result<Vec<f64>, ElectroError> {
    let plus = resistivity_at(spec, &dir.scale(step), opts)?;
    let minus = resistivity_at(spec, &dir.scale(-step), opts)?;
    Ok(entries.iter().map(|&(a, b)| (plus[(a, b)] - minus[(a, b)]) / (2.0 * step * rho0)).collect())
}

fn checked(
    name: &'static str,
    spec: &CompositeSpec,
    opts: &ElectroOptions,
    dir: &SymTensor2,
    step: f64,
    rho0: f64,
    entries: &[(usize, usize)],
) -> Result<Vec<f64>, ElectroError> {
    let coarse = central(spec, opts, dir, step, rho0, entries)?;
    let fine = central(spec, opts, dir, 0.5 * step, rho0, entries)?;
    let scale = fine.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    for (c, f) in coarse.iter().zip(&fine) {
        let change = (c - f).abs() / scale;
        if !(change <= RICHARDSON_TOLERANCE) {
            return Err(ElectroError::FiniteDifference { coefficient: name, step, change: 100.0 * change });
        }
    }
    Ok(coarse)
}

/// Normal coefficients `(λ11, λ12)` from a uniaxial strain along `axis`.
fn axial(spec: &CompositeSpec, opts: &ElectroOptions, axis: usize, step: f64, rho0: f64) -> Result<(f64, f64), ElectroError> {
    let mut d = [0.0; 3];
    d[axis] = 1.0;
    let other = (axis + 1) % 3;
    let v = checked("lambda11/lambda12", spec, opts, &SymTensor2::diagonal(d[0], d[1], d[2]), step, rho0, &[(axis, axis), (other, other)])?;
    Ok((v[0], v[1]))
}

/// Piezoresistivity coefficients by central finite differences of the full
/// strain-dependent conductivity model, with step `step`.
pub fn piezoresistivity_coeffs_with_step(spec: &CompositeSpec, step: f64) -> Result<PiezoCoefficients, ElectroError> {
    if !(step > 0.0 && step < 0.1) {
        return Err(ElectroError::Domain(format!("finite-difference step {step}")));
    }
    let opts = options();
    let rho = resistivity_at(spec, &SymTensor2::ZERO, &opts)?;
    let rho0 = rho[(0, 0)];
    let (lambda11, lambda12) = axial(spec, &opts, 0, step, rho0)?;
    // unit engineering shear 2ε12 = 1
    let shear = SymTensor2::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.5);
    let lambda44 = checked("lambda44", spec, &opts, &shear, step, rho0, &[(0, 1)])?[0];
    Ok(PiezoCoefficients { rho0, lambda11, lambda12, lambda44 })
}

/// Piezoresistivity coefficients with the default step.
pub fn piezoresistivity_coeffs(spec: &CompositeSpec) -> Result<PiezoCoefficients, ElectroError> {
    piezoresistivity_coeffs_with_step(spec, DEFAULT_STEP)
}
