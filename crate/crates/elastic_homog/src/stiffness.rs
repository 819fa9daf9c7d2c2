use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use tensorlab::average::{OrientationGrid, UNIFORM_ODF};
use tensorlab::rotation::rotate_tensor4_by;
use tensorlab::{Tensor4Voigt, TensorKind};

use crate::eshelby::eshelby_elastic;
use crate::fracture::fracture_energy;
use crate::geometry::{interphase_thickness_ratio, interphase_volume_fraction, AspectRatio};
use crate::spec::CompositeSpec;
use crate::ElasticError;

/// Homogenized elastic and fracture properties.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveElastic {
    pub c_eff: Tensor4Voigt,
    pub e_eff: f64,
    pub nu_eff: f64,
    /// Interphase volume fraction.
    pub f_i: f64,
    /// Critical energy release rate including filler bridging (J/m²).
    pub g_c: f64,
}

/// Relative singular-value floor below which a phase contrast is rejected.
const CONTRAST_RCOND: f64 = 1e-12;

/// Dilute strain concentration of an inclusion with stiffness `c_phase` and
/// Eshelby tensor `s` in matrix `c_m`, all in the inclusion frame.
pub fn dilute_concentration(
    c_phase: &Tensor4Voigt,
    c_m: &Tensor4Voigt,
    s: &Tensor4Voigt,
    phase: &'static str,
) -> Result<Tensor4Voigt, ElasticError> {
    let delta = *c_phase - *c_m;
    let identity = Tensor4Voigt::identity(TensorKind::StrainMap);
    if delta.frobenius() <= 1e-14 * c_m.frobenius() {
        return Ok(identity);
    }
    let sv = delta.to_mandel().singular_values();
    if sv.min() <= CONTRAST_RCOND * sv.max() {
        return Err(ElasticError::PhaseContrast(phase));
    }
    let m = delta.try_inverse().map_err(|_| ElasticError::PhaseContrast(phase))? * *c_m;
    let t = (*s + m).try_inverse().map_err(|_| ElasticError::Singular("Eshelby plus contrast tensor"))? * -1.0;
    Ok(identity + *s * t)
}

fn cache() -> &'static Mutex<HashMap<String, EffectiveElastic>> {
    static CACHE: OnceLock<Mutex<HashMap<String, EffectiveElastic>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Effective stiffness for randomly oriented fillers, with fracture energy.
/// Results are memoised per parameter set.
pub fn effective_stiffness(spec: &CompositeSpec) -> Result<EffectiveElastic, ElasticError> {
    let key = format!("{spec:?}");
    if let Some(hit) = cache().lock().map_err(|_| ElasticError::Singular("poisoned cache"))?.get(&key) {
        return Ok(hit.clone());
    }
    let out = effective_stiffness_with_order(spec, OrientationGrid::DEFAULT_ORDER)?;
    if let Ok(mut c) = cache().lock() {
        c.insert(key, out.clone());
    }
    Ok(out)
}

/// Uncached evaluation with an explicit orientation quadrature order.
pub fn effective_stiffness_with_order(spec: &CompositeSpec, order: usize) -> Result<EffectiveElastic, ElasticError> {
    spec.validate()?;
    let c_m = Tensor4Voigt::isotropic_stiffness(spec.e_m, spec.nu_m);
    let c_i = Tensor4Voigt::isotropic_stiffness(spec.e_i, spec.interphase_poisson());
    let c_p = Tensor4Voigt::isotropic_stiffness(spec.e_cnt, spec.nu_cnt);
    let g_c = fracture_energy(spec)?;
    let matrix_only = |f_i: f64| EffectiveElastic { c_eff: c_m, e_eff: spec.e_m, nu_eff: spec.nu_m, f_i, g_c };

    if spec.f_p0 == 0.0 {
        return Ok(matrix_only(0.0));
    }
    let kappa = AspectRatio::new(spec.aspect_ratio())?;
    let eta = interphase_thickness_ratio(spec.t_interphase, spec.d_cnt, kappa);
    let f_p = spec.f_p0;
    let f_i = interphase_volume_fraction(f_p, kappa, eta)?;
    let f_m = 1.0 - f_p - f_i;
    if c_i == c_m && c_p == c_m {
        return Ok(matrix_only(f_i));
    }

    let s = eshelby_elastic(kappa.get(), spec.nu_m)?;
    let ai_dil = dilute_concentration(&c_i, &c_m, &s, "interphase")?;
    let ap_dil = dilute_concentration(&c_p, &c_m, &s, "filler")?;
    let identity = Tensor4Voigt::identity(TensorKind::StrainMap);
    let norm = (identity * f_m + ai_dil * f_i + ap_dil * f_p)
        .try_inverse()
        .map_err(|_| ElasticError::Singular("concentration normalisation"))?;
    let a_i = ai_dil * norm;
    let a_p = ap_dil * norm;
    let ca_i = c_i * a_i;
    let ca_p = c_p * a_p;

    let grid = OrientationGrid::hemisphere(order)?;
    let avg = |t: &Tensor4Voigt| {
        let m = grid.integrate(|n| rotate_tensor4_by(t, &n.mandel).matrix, |_| UNIFORM_ODF);
        Tensor4Voigt::new(m, t.kind)
    };
    let numerator = c_m * f_m + avg(&ca_i) * f_i + avg(&ca_p) * f_p;
    let denominator = identity * f_m + avg(&a_i) * f_i + avg(&a_p) * f_p;
    let c_eff = numerator * denominator.try_inverse().map_err(|_| ElasticError::Singular("averaged concentration"))?;
    let iso = c_eff.isotropic_projection();
    Ok(EffectiveElastic { c_eff, e_eff: iso.young(), nu_eff: iso.poisson(), f_i, g_c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_fraction_returns_matrix_exactly() {
        let spec = CompositeSpec::mwcnt_epoxy().with_volume_fraction(0.0);
        let e = effective_stiffness(&spec).unwrap();
        assert_eq!(e.c_eff, Tensor4Voigt::isotropic_stiffness(spec.e_m, spec.nu_m));
        assert_eq!(e.g_c, spec.g0);
    }

    #[test]
    fn identical_phases_return_matrix() {
        let mut spec = CompositeSpec::mwcnt_epoxy();
        spec.e_cnt = spec.e_m;
        spec.e_i = spec.e_m;
        spec.nu_cnt = spec.nu_m;
        let e = effective_stiffness(&spec).unwrap();
        let c_m = Tensor4Voigt::isotropic_stiffness(spec.e_m, spec.nu_m);
        assert!((e.c_eff.matrix - c_m.matrix).norm() <= 1e-10 * c_m.matrix.norm());
    }

    #[test]
    fn identical_phases_through_full_scheme() {
        let spec = CompositeSpec::mwcnt_epoxy();
        let c_m = Tensor4Voigt::isotropic_stiffness(spec.e_m, spec.nu_m);
        let s = eshelby_elastic(310.0, spec.nu_m).unwrap();
        let a = dilute_concentration(&c_m, &c_m, &s, "filler").unwrap();
        assert_eq!(a, Tensor4Voigt::identity(TensorKind::StrainMap));
    }

    #[test]
    fn rank_deficient_contrast_rejected() {
        let c_m = Tensor4Voigt::isotropic_stiffness(1.0, 0.3);
        // same shear modulus, different bulk: contrast has rank one
        let g = 1.0 / 2.6;
        let k_m = 1.0 / (3.0 * 0.4);
        let k = 2.0 * k_m;
        let c_p = Tensor4Voigt::from_lame(k - 2.0 * g / 3.0, g, TensorKind::Stiffness);
        let s = eshelby_elastic(5.0, 0.3).unwrap();
        assert_eq!(dilute_concentration(&c_p, &c_m, &s, "filler"), Err(ElasticError::PhaseContrast("filler")));
    }

    #[test]
    fn reference_material_is_isotropic_spd_and_stiffer() {
        let spec = CompositeSpec::mwcnt_epoxy();
        let e = effective_stiffness(&spec).unwrap();
        assert!(e.c_eff.anisotropy() < 1e-6, "anisotropy {}", e.c_eff.anisotropy());
        assert!(e.c_eff.is_symmetric(1e-8));
        assert!(e.c_eff.to_mandel().symmetric_eigenvalues().min() > 0.0);
        assert!(e.e_eff > spec.e_m, "E_eff {}", e.e_eff);
        assert!(e.f_i > 0.0 && e.f_i < 1.0 - spec.f_p0);
        // Voigt upper bound
        let f_p = spec.f_p0;
        let bound = (1.0 - f_p - e.f_i) * spec.e_m + e.f_i * spec.e_i + f_p * spec.e_cnt;
        assert!(e.e_eff <= bound);
    }

    #[test]
    fn order_convergence() {
        let spec = CompositeSpec::mwcnt_epoxy();
        let a = effective_stiffness_with_order(&spec, 32).unwrap();
        let b = effective_stiffness_with_order(&spec, 48).unwrap();
        assert_relative_eq!(a.e_eff, b.e_eff, max_relative = 1e-9);
    }

    #[test]
    fn modulus_increases_with_fraction() {
        let mut last = 0.0;
        for f in [0.0, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1] {
            let e = effective_stiffness(&CompositeSpec::mwcnt_epoxy().with_volume_fraction(f)).unwrap().e_eff;
            assert!(e > last, "f={f}: {e} <= {last}");
            last = e;
        }
    }

    #[test]
    fn continuous_near_zero_fraction() {
        let spec = CompositeSpec::mwcnt_epoxy();
        let e = effective_stiffness(&spec.clone().with_volume_fraction(1e-7)).unwrap();
        assert_relative_eq!(e.e_eff, spec.e_m, max_relative = 1e-4);
    }
}
