use nalgebra::{Matrix3, Vector3};
use tensorlab::average::OrientationGrid;
use tensorlab::SymTensor2;

use elastic_homog::CompositeSpec;

use crate::percolation::{
    percolated_fraction, percolation_threshold, percolation_threshold_with, strained_volume_fraction,
    OrientationDensity, ThresholdQuadrature,
};
use crate::tunneling::{equivalent_cylinder, eshelby_electrical, interphase_layer, Channel, TunnelingParams};
use crate::ElectroError;

/// Quadrature settings for the conductivity model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectroOptions {
    /// Gauss points per Euler angle in the orientational average.
    pub orientation_order: usize,
    /// Fixed threshold quadrature, or `None` for the self-converging one.
    pub threshold: Option<ThresholdQuadrature>,
}

impl Default for ElectroOptions {
    fn default() -> Self {
        ElectroOptions { orientation_order: OrientationGrid::DEFAULT_ORDER, threshold: None }
    }
}

/// Strain-dependent conduction state of the composite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConductionState {
    pub f_p: f64,
    pub f_c: f64,
    /// Fraction of fillers in the conductive network.
    pub xi: f64,
    /// Effective conductivity (S/m).
    pub sigma_eff: Matrix3<f64>,
}

impl ConductionState {
    /// Mean of the principal conductivities.
    pub fn scalar_conductivity(&self) -> f64 {
        self.sigma_eff.trace() / 3.0
    }

    pub fn resistivity(&self) -> Result<Matrix3<f64>, ElectroError> {
        self.sigma_eff.try_inverse().ok_or(ElectroError::Singular("conductivity tensor"))
    }
}

/// Local (fibre-frame) contribution `f (σ_f − σ_m) A` of one channel, with
/// the fibre axis as third component.
fn channel_contribution(
    spec: &CompositeSpec,
    channel: Channel,
    f_p: f64,
    f_c: f64,
    tp: &TunnelingParams,
) -> Result<Vector3<f64>, ElectroError> {
    let layer = interphase_layer(channel, f_p, f_c, tp)?;
    let cyl = equivalent_cylinder(spec.sigma_cnt, spec.sigma_cnt, tp.core_radius, spec.l_cnt, layer.thickness, layer.conductivity)?;
    let f_eff = f_p * cyl.volume_multiplier;
    let (s11, s33) = match channel {
        Channel::Hopping => eshelby_electrical(spec.aspect_ratio())?,
        Channel::Network => (0.5, 0.0),
    };
    let sigma_f = Vector3::new(cyl.transverse, cyl.transverse, cyl.longitudinal);
    let shape = Vector3::new(s11, s11, s33);
    let sm = spec.sigma_m;
    let mut out = Vector3::zeros();
    for k in 0..3 {
        let contrast = sigma_f[k] - sm;
        let denom = 1.0 + shape[k] * contrast / sm;
        if !(denom.is_finite() && denom != 0.0) {
            return Err(ElectroError::Singular("dilute concentration"));
        }
        let a_dil = 1.0 / denom;
        let a = a_dil / ((1.0 - f_eff) + f_eff * a_dil);
        out[k] = f_eff * contrast * a;
    }
    Ok(out)
}

/// Effective conductivity tensor under strain `eps`, from the matrix plus
/// electron-hopping and networking contributions of the reoriented fillers.
pub fn effective_conductivity(
    spec: &CompositeSpec,
    eps: &SymTensor2,
    opts: &ElectroOptions,
) -> Result<ConductionState, ElectroError> {
    spec.validate()?;
    let s = spec.aspect_ratio();
    let f_c = match opts.threshold {
        Some(q) => percolation_threshold_with(s, eps, q)?,
        None => percolation_threshold(s, eps)?,
    };
    let f_p = strained_volume_fraction(spec.f_p0, eps)?;
    let matrix_only = Matrix3::identity() * spec.sigma_m;
    if spec.f_p0 == 0.0 {
        return Ok(ConductionState { f_p, f_c, xi: 0.0, sigma_eff: matrix_only });
    }
    let xi = percolated_fraction(f_p, f_c);
    let tp = TunnelingParams::from_spec(spec);
    let mut local = channel_contribution(spec, Channel::Hopping, f_p, f_c, &tp)? * (1.0 - xi);
    if xi > 0.0 {
        local += channel_contribution(spec, Channel::Network, f_p, f_c, &tp)? * xi;
    }
    let odf = OrientationDensity::new(eps)?;
    let grid = OrientationGrid::hemisphere(opts.orientation_order)?;
    let diag = Matrix3::from_diagonal(&local);
    let avg = grid.integrate(|n| n.rotation * diag * n.rotation.transpose(), |o| odf.normalized(&o.axis()));
    let sigma_eff = matrix_only + avg;
    let sigma_eff = (sigma_eff + sigma_eff.transpose()) * 0.5;
    if sigma_eff.cholesky().is_none() {
        return Err(ElectroError::Singular("non-positive conductivity tensor"));
    }
    Ok(ConductionState { f_p, f_c, xi, sigma_eff })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn scalar(spec: &CompositeSpec) -> f64 {
        effective_conductivity(spec, &SymTensor2::ZERO, &ElectroOptions::default()).unwrap().scalar_conductivity()
    }

    #[test]
    fn matrix_only_without_fillers() {
        let spec = CompositeSpec::mwcnt_epoxy().with_volume_fraction(0.0);
        let st = effective_conductivity(&spec, &SymTensor2::ZERO, &ElectroOptions::default()).unwrap();
        assert_eq!(st.sigma_eff, Matrix3::identity() * 1.036e-10);
        assert_eq!(st.xi, 0.0);
    }

    #[test]
    fn unstrained_state_is_isotropic() {
        for f in [0.001, 0.01, 0.04] {
            let st = effective_conductivity(&CompositeSpec::mwcnt_epoxy().with_volume_fraction(f), &SymTensor2::ZERO, &ElectroOptions::default())
                .unwrap();
            let tr = st.sigma_eff.trace();
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        assert!(st.sigma_eff[(i, j)].abs() < 1e-12 * tr);
                    }
                }
                assert_relative_eq!(st.sigma_eff[(i, i)], tr / 3.0, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn jump_across_threshold() {
        let spec = CompositeSpec::mwcnt_epoxy();
        let f_c = percolation_threshold(spec.aspect_ratio(), &SymTensor2::ZERO).unwrap();
        let below = scalar(&spec.clone().with_volume_fraction(0.5 * f_c));
        let above = scalar(&spec.clone().with_volume_fraction(2.0 * f_c));
        assert!(above / below >= 1e3, "{below} -> {above}");
    }

    #[test]
    fn continuous_at_threshold() {
        let spec = CompositeSpec::mwcnt_epoxy();
        let f_c = percolation_threshold(spec.aspect_ratio(), &SymTensor2::ZERO).unwrap();
        // the networking slope is steep, so the gap closes linearly in the offset
        let gap = |h: f64| {
            let lo = scalar(&spec.clone().with_volume_fraction(f_c * (1.0 - h)));
            let hi = scalar(&spec.clone().with_volume_fraction(f_c * (1.0 + h)));
            (hi - lo) / lo
        };
        let (a, b) = (gap(1e-10), gap(1e-12));
        assert!(b < 1e-3 && b < 0.05 * a, "{a} {b}");
    }

    #[test]
    fn increases_with_fraction() {
        let mut last = 0.0;
        for f in [0.0, 0.001, 0.002, 0.003, 0.005, 0.01, 0.03, 0.06, 0.1] {
            let s = scalar(&CompositeSpec::mwcnt_epoxy().with_volume_fraction(f));
            assert!(s > last);
            last = s;
        }
    }

    #[test]
    fn spd_under_strain() {
        let spec = CompositeSpec::mwcnt_epoxy();
        for eps in [
            SymTensor2::diagonal(0.02, -0.006, -0.006),
            SymTensor2::new(0.0, 0.0, 0.0, 0.01, 0.0, 0.02),
            SymTensor2::diagonal(-0.01, 0.003, 0.003),
        ] {
            let st = effective_conductivity(&spec, &eps, &ElectroOptions::default()).unwrap();
            assert!(st.sigma_eff.symmetric_eigenvalues().min() > 0.0);
        }
    }
}
