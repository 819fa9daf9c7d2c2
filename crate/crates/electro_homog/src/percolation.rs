use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Mutex, OnceLock};

use nalgebra::{Matrix3, Vector3};
use tensorlab::{gauss_legendre, SymTensor2};

use crate::ElectroError;

/// Fraction of fillers taking part in the conductive network.
pub fn percolated_fraction(f_p: f64, f_c: f64) -> f64 {
    if f_p < f_c {
        return 0.0;
    }
    let c = f_c.cbrt();
    ((f_p.cbrt() - c) / (1.0 - c)).min(1.0)
}

fn stretch(eps: &SymTensor2) -> Result<Matrix3<f64>, ElectroError> {
    if !eps.is_finite() {
        return Err(ElectroError::Domain("non-finite strain".into()));
    }
    let lowest = eps.principal_values()[0];
    if 1.0 + lowest <= 0.0 {
        return Err(ElectroError::NonPositiveStretch(1.0 + lowest));
    }
    Ok(Matrix3::identity() + eps.to_matrix())
}

/// Filler volume fraction after the volume change produced by `eps`.
pub fn strained_volume_fraction(f_p0: f64, eps: &SymTensor2) -> Result<f64, ElectroError> {
    // product of principal stretches
    Ok(f_p0 / stretch(eps)?.determinant())
}

/// Orientation density of inextensible fibres rigidly convected by the
/// stretch `I + ε`, as a density over the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientationDensity {
    inverse: Matrix3<f64>,
    volume_ratio: f64,
}

impl OrientationDensity {
    pub fn new(eps: &SymTensor2) -> Result<Self, ElectroError> {
        let f = stretch(eps)?;
        let inverse = f.try_inverse().ok_or(ElectroError::Singular("stretch tensor"))?;
        Ok(OrientationDensity { inverse, volume_ratio: f.determinant() })
    }

    pub fn isotropic() -> Self {
        OrientationDensity { inverse: Matrix3::identity(), volume_ratio: 1.0 }
    }

    /// Unnormalised density; equal to one everywhere in the unstrained state.
    pub fn raw(&self, axis: &Vector3<f64>) -> f64 {
        let r = (self.inverse * axis).norm();
        1.0 / (self.volume_ratio * r * r * r)
    }

    /// Density normalised over a hemisphere of axes. The raw density is the
    /// push-forward of the uniform one, so its sphere integral is exactly 4π.
    pub fn normalized(&self, axis: &Vector3<f64>) -> f64 {
        self.raw(axis) / (2.0 * PI)
    }
}

fn axis(gamma1: f64, gamma2: f64) -> Vector3<f64> {
    let (s2, c2) = gamma2.sin_cos();
    Vector3::new(s2 * gamma1.cos(), s2 * gamma1.sin(), c2)
}

/// Unnormalised orientation density at Euler angles `(γ1, γ2)` under strain `eps`.
pub fn strained_odf(eps: &SymTensor2, gamma1: f64, gamma2: f64) -> Result<f64, ElectroError> {
    Ok(OrientationDensity::new(eps)?.raw(&axis(gamma1, gamma2)))
}

/// Rule orders for the nested orientation integrals of the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ThresholdQuadrature {
    pub outer: usize,
    pub inner: usize,
}

impl Default for ThresholdQuadrature {
    fn default() -> Self {
        ThresholdQuadrature { outer: 24, inner: 24 }
    }
}

impl ThresholdQuadrature {
    const LADDER: [usize; 5] = [16, 24, 32, 48, 64];
    const RELATIVE_TOLERANCE: f64 = 1e-6;
}

struct HemisphereRule {
    polar: Vec<(f64, f64)>,
    azimuth: usize,
}

impl HemisphereRule {
    fn new(order: usize) -> Result<Self, ElectroError> {
        Ok(HemisphereRule { polar: gauss_legendre(order)?.on(0.0, FRAC_PI_2).collect(), azimuth: 2 * order })
    }

    /// Integral of `f(direction, polar angle)` over the hemisphere about the third axis of `frame`.
    fn integrate<F: FnMut(&Vector3<f64>, f64) -> f64>(&self, frame: &Matrix3<f64>, mut f: F) -> f64 {
        let dphi = 2.0 * PI / self.azimuth as f64;
        let mut total = 0.0;
        for &(theta, w) in &self.polar {
            let (st, ct) = theta.sin_cos();
            let mut ring = 0.0;
            for k in 0..self.azimuth {
                let phi = (k as f64 + 0.5) * dphi;
                let local = Vector3::new(st * phi.cos(), st * phi.sin(), ct);
                ring += f(&(frame * local), theta);
            }
            total += w * st * ring * dphi;
        }
        total
    }
}

/// Orthonormal frame whose third column is `n`.
fn pole_frame(n: &Vector3<f64>) -> Matrix3<f64> {
    let helper = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = helper.cross(n).normalize();
    let e2 = n.cross(&e1);
    Matrix3::from_columns(&[e1, e2, *n])
}

/// Threshold at a fixed quadrature order. The mean sine of the angle
/// between a fibre and all others is evaluated in a frame aligned with that
/// fibre, which keeps the inner integrand smooth.
pub fn percolation_threshold_with(s: f64, eps: &SymTensor2, quad: ThresholdQuadrature) -> Result<f64, ElectroError> {
    if !(s.is_finite() && s > 1.0) {
        return Err(ElectroError::Domain(format!("aspect ratio {s}")));
    }
    let odf = OrientationDensity::new(eps)?;
    let outer = HemisphereRule::new(quad.outer)?;
    let inner = HemisphereRule::new(quad.inner)?;
    let identity = Matrix3::identity();
    let integral = outer.integrate(&identity, |n, _| {
        let frame = pole_frame(n);
        // antipodal symmetry: half the sphere integral equals the hemisphere integral
        let mean_sine = inner.integrate(&frame, |m, theta| theta.sin() * odf.normalized(m));
        mean_sine * odf.normalized(n)
    });
    Ok(PI / (5.77 * s * integral))
}

type ThresholdKey = (u64, [u64; 6]);

fn cache() -> &'static Mutex<HashMap<ThresholdKey, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<ThresholdKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Percolation threshold of fillers with aspect ratio `s` under strain
/// `eps`. Quadrature orders are raised until successive values agree to
/// 1e-6 relative. Results are memoised.
pub fn percolation_threshold(s: f64, eps: &SymTensor2) -> Result<f64, ElectroError> {
    let key = (s.to_bits(), eps.0.map(f64::to_bits));
    if let Some(&hit) = cache().lock().map_err(|_| ElectroError::Singular("poisoned cache"))?.get(&key) {
        return Ok(hit);
    }
    let ladder = ThresholdQuadrature::LADDER;
    let at = |n: usize| percolation_threshold_with(s, eps, ThresholdQuadrature { outer: n, inner: n });
    let mut previous = at(ladder[0])?;
    let mut change = f64::INFINITY;
    for pair in ladder.windows(2) {
        let next = at(pair[1])?;
        change = ((next - previous) / next).abs();
        previous = next;
        if change <= ThresholdQuadrature::RELATIVE_TOLERANCE {
            if let Ok(mut c) = cache().lock() {
                c.insert(key, next);
            }
            return Ok(next);
        }
    }
    Err(ElectroError::ThresholdNotConverged { change, low: ladder[ladder.len() - 2], high: ladder[ladder.len() - 1] })
}
