//! Fracture toughness from matrix cracking plus filler bridging.

use std::f64::consts::PI;

use tensorlab::{integrate_adaptive, AdaptiveOptions};

use crate::spec::CompositeSpec;
use crate::ElasticError;

fn oblique_strength(theta: f64, spec: &CompositeSpec) -> f64 {
    spec.sigma_ult * (1.0 - spec.a_incl * theta.tan())
}

fn critical_length_unchecked(theta: f64, spec: &CompositeSpec) -> f64 {
    oblique_strength(theta, spec) * spec.d_cnt / (2.0 * spec.tau_int * (spec.mu_snub * theta).exp())
}

/// Embedment length separating pull-out from rupture for a filler inclined at `theta`.
pub fn critical_length(theta: f64, spec: &CompositeSpec) -> Result<f64, ElasticError> {
    if !(theta >= 0.0 && theta < spec.theta_max.max(1e-300) + 1e-15) {
        return Err(ElasticError::Domain(format!("inclination {theta} rad")));
    }
    if oblique_strength(theta, spec) <= 0.0 {
        return Err(ElasticError::Domain(format!("inclination {theta} rad leaves no filler strength")));
    }
    Ok(critical_length_unchecked(theta, spec))
}

/// Work to pull out (short embedment) or break (long embedment) one filler.
pub fn bridging_work(l: f64, theta: f64, spec: &CompositeSpec) -> Result<f64, ElasticError> {
    if !(0.0..=0.5 * spec.l_cnt).contains(&l) {
        return Err(ElasticError::Domain(format!("embedment length {l} m")));
    }
    Ok(bridging_work_unchecked(l, theta, spec))
}

fn rupture_work(spec: &CompositeSpec) -> f64 {
    PI * spec.d_cnt.powi(2) * spec.sigma_ult.powi(2) * spec.l_cnt / (8.0 * spec.e_cnt)
}

fn pullout_work(l: f64, theta: f64, spec: &CompositeSpec) -> f64 {
    l * l * spec.tau_int * PI * spec.d_cnt * (spec.mu_snub * theta).exp() / 2.0
}

fn bridging_work_unchecked(l: f64, theta: f64, spec: &CompositeSpec) -> f64 {
    // beyond the zero-strength inclination every embedment ruptures
    if l < 0.5 * critical_length_unchecked(theta, spec) {
        pullout_work(l, theta, spec)
    } else {
        rupture_work(spec)
    }
}

fn density_kernel(theta: f64, spec: &CompositeSpec) -> f64 {
    let sp = 2.0 * spec.p_shape - 1.0;
    let sq = 2.0 * spec.q_shape - 1.0;
    let s = if sp == 0.0 { 1.0 } else { theta.sin().powf(sp) };
    let c = if sq == 0.0 { 1.0 } else { theta.cos().max(0.0).powf(sq) };
    s * c
}

fn density_mass(spec: &CompositeSpec) -> Result<f64, ElasticError> {
    let opts = AdaptiveOptions { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 4000 };
    let mass = integrate_adaptive(|t| density_kernel(t, spec), spec.theta_min, spec.theta_max, opts)?;
    if mass.is_finite() && mass > 0.0 {
        Ok(mass)
    } else {
        Err(ElasticError::DegenerateOrientation { lo: spec.theta_min, hi: spec.theta_max })
    }
}

/// Normalised inclination density between `theta_min` and `theta_max`.
pub fn orientation_density(theta: f64, spec: &CompositeSpec) -> Result<f64, ElasticError> {
    if !(spec.theta_min..=spec.theta_max).contains(&theta) {
        return Ok(0.0);
    }
    Ok(density_kernel(theta, spec) / density_mass(spec)?)
}

/// Matrix fracture energy plus the bridging contribution of the fillers,
/// integrated adaptively over embedment length and inclination.
pub fn fracture_energy(spec: &CompositeSpec) -> Result<f64, ElasticError> {
    spec.validate()?;
    if spec.f_p0 == 0.0 {
        return Ok(spec.g0);
    }
    let mass = density_mass(spec)?;
    let area = PI * spec.d_cnt * spec.d_cnt / 4.0;
    let prefactor = 2.0 * spec.f_p0 / (area * spec.l_cnt);
    let half = 0.5 * spec.l_cnt;
    // well inside the nominal 1e-4·G0 budget so that the result is also
    // accurate relative to the bridging term alone
    let outer_tol = 1e-4 * spec.g0 / prefactor * 1e-4;
    let inner_tol = outer_tol / (4.0 * (spec.theta_max - spec.theta_min));
    let inner_opts = AdaptiveOptions { abs_tol: inner_tol, rel_tol: 1e-12, max_intervals: 200 };

    let mut inner_error = None;
    let outer = |theta: f64| -> f64 {
        let split = (0.5 * critical_length_unchecked(theta, spec)).clamp(0.0, half);
        let mut total = 0.0;
        for (lo, hi) in [(0.0, split), (split, half)] {
            if hi > lo {
                match integrate_adaptive(|l| bridging_work_unchecked(l, theta, spec), lo, hi, inner_opts) {
                    Ok(v) => total += v,
                    Err(e) => inner_error = Some(e),
                }
            }
        }
        total * density_kernel(theta, spec) / mass * theta.cos()
    };
    let outer_opts = AdaptiveOptions { abs_tol: outer_tol, rel_tol: 1e-12, max_intervals: 2000 };
    let integral = integrate_adaptive(outer, spec.theta_min, spec.theta_max, outer_opts)?;
    if let Some(e) = inner_error {
        return Err(e.into());
    }
    Ok(spec.g0 + prefactor * integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // σ_ult·D/(2τ) for the reference material
    const CRITICAL_LENGTH_0: f64 = 3.853_723_404_255_319e-6;
    // π D² σ_ult² L / (8 E_cnt) for the reference material
    const RUPTURE_WORK: f64 = 2.363_108_522_030_581e-13;

    #[test]
    fn critical_length_reference() {
        let spec = CompositeSpec::mwcnt_epoxy();
        assert_relative_eq!(critical_length(0.0, &spec).unwrap(), CRITICAL_LENGTH_0, max_relative = 1e-14);
    }

    #[test]
    fn critical_length_monotone_with_snubbing() {
        let mut spec = CompositeSpec::mwcnt_epoxy();
        spec.mu_snub = 0.3;
        let mut last = f64::INFINITY;
        for i in 0..80 {
            let l = critical_length(i as f64 * 0.018, &spec).unwrap();
            assert!(l < last);
            last = l;
        }
    }

    #[test]
    fn critical_length_domain() {
        let spec = CompositeSpec::mwcnt_epoxy();
        let limit = (1.0 / spec.a_incl).atan();
        assert!(critical_length(limit + 1e-3, &spec).is_err());
        assert!(critical_length(-0.1, &spec).is_err());
    }

    #[test]
    fn snubbing_free_denominator() {
        let spec = CompositeSpec::mwcnt_epoxy();
        let th: f64 = 0.4;
        let expected = spec.sigma_ult * (1.0 - spec.a_incl * th.tan()) * spec.d_cnt / (2.0 * spec.tau_int);
        assert_relative_eq!(critical_length(th, &spec).unwrap(), expected, max_relative = 1e-15);
    }

    #[test]
    fn work_branches() {
        let spec = CompositeSpec::mwcnt_epoxy();
        assert_eq!(bridging_work(0.0, 0.3, &spec).unwrap(), 0.0);
        // half-length 1.605 μm is below L_c/2 at θ = 0: pull-out
        let l = 1.0e-6;
        assert_relative_eq!(
            bridging_work(l, 0.0, &spec).unwrap(),
            l * l * spec.tau_int * PI * spec.d_cnt / 2.0,
            max_relative = 1e-15
        );
        // at steep inclination L_c is short: rupture
        assert_relative_eq!(bridging_work(1.5e-6, 1.5, &spec).unwrap(), RUPTURE_WORK, max_relative = 1e-14);
        assert!(bridging_work(2e-6, 0.0, &spec).is_err());
    }

    #[test]
    fn uniform_density_normalisation() {
        let spec = CompositeSpec::mwcnt_epoxy();
        assert_relative_eq!(density_mass(&spec).unwrap(), PI / 2.0, max_relative = 1e-13);
        assert_relative_eq!(orientation_density(0.3, &spec).unwrap(), 2.0 / PI, max_relative = 1e-13);
    }

    #[test]
    fn matrix_only_toughness() {
        let spec = CompositeSpec::mwcnt_epoxy().with_volume_fraction(0.0);
        assert_eq!(fracture_energy(&spec).unwrap(), 133.0);
    }

    #[test]
    fn toughness_increases_with_fraction() {
        let mut last = 0.0;
        for f in [0.0, 0.001, 0.005, 0.01, 0.03, 0.1] {
            let g = fracture_energy(&CompositeSpec::mwcnt_epoxy().with_volume_fraction(f)).unwrap();
            assert!(g > last);
            last = g;
        }
    }

    /// Midpoint sum on an `n × n` grid; cells cut by the pull-out/rupture
    /// boundary are split there.
    fn brute_force(spec: &CompositeSpec, n: usize) -> f64 {
        let mass = density_mass(spec).unwrap();
        let dt = (spec.theta_max - spec.theta_min) / n as f64;
        let half = 0.5 * spec.l_cnt;
        let dl = half / n as f64;
        let mut sum = 0.0;
        for i in 0..n {
            let th = spec.theta_min + (i as f64 + 0.5) * dt;
            let brk = 0.5 * critical_length_unchecked(th, spec);
            let mut row = 0.0;
            for j in 0..n {
                let (a, b) = (j as f64 * dl, (j + 1) as f64 * dl);
                if brk > a && brk < b {
                    row += (brk - a) * bridging_work_unchecked(0.5 * (a + brk), th, spec);
                    row += (b - brk) * bridging_work_unchecked(0.5 * (brk + b), th, spec);
                } else {
                    row += dl * bridging_work_unchecked(0.5 * (a + b), th, spec);
                }
            }
            sum += row * density_kernel(th, spec) / mass * th.cos() * dt;
        }
        let area = PI * spec.d_cnt * spec.d_cnt / 4.0;
        2.0 * spec.f_p0 / (area * spec.l_cnt) * sum
    }

    #[test]
    fn matches_brute_force_sum() {
        let mut cases = vec![CompositeSpec::mwcnt_epoxy()];
        let mut rupture = CompositeSpec::mwcnt_epoxy();
        rupture.tau_int = 5e9;
        cases.push(rupture);
        let mut snub = CompositeSpec::mwcnt_epoxy();
        snub.mu_snub = 0.5;
        snub.theta_max = 1.2;
        cases.push(snub);
        for spec in cases {
            let g_br = fracture_energy(&spec).unwrap() - spec.g0;
            let oracle = brute_force(&spec, 10_000);
            assert!(g_br > 0.0);
            assert!((g_br - oracle).abs() <= 1e-6 * oracle, "{g_br} vs {oracle}");
        }
    }
}
