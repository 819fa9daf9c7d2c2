use crate::ElasticError;

/// Length-to-diameter ratio of a prolate filler, strictly greater than one.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AspectRatio(f64);

impl AspectRatio {
    pub fn new(kappa: f64) -> Result<Self, ElasticError> {
        if kappa.is_finite() && kappa > 1.0 {
            Ok(AspectRatio(kappa))
        } else {
            Err(ElasticError::Domain(format!("aspect ratio {kappa}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Surface-area ratio between the volume-equivalent sphere and the filler.
pub fn sphericity(kappa: AspectRatio) -> f64 {
    let k = kappa.get();
    let ang = (1.0 / k).acos();
    let tan = (k * k - 1.0).sqrt();
    2.0 * k.powf(2.0 / 3.0) * tan / (tan + k * k * ang)
}

/// Interphase thickness over the volume-equivalent sphere diameter.
pub fn interphase_thickness_ratio(t: f64, d_cnt: f64, kappa: AspectRatio) -> f64 {
    t / (d_cnt * kappa.get().cbrt())
}

/// Volume fraction of a penetrable soft interphase of relative thickness
/// `eta` around fillers of the given aspect ratio.
pub fn interphase_volume_fraction(f_p: f64, kappa: AspectRatio, eta: f64) -> Result<f64, ElasticError> {
    if !(0.0..1.0).contains(&f_p) {
        return Err(ElasticError::Domain(format!("filler fraction {f_p}")));
    }
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(ElasticError::Domain(format!("interphase thickness ratio {eta}")));
    }
    let n = sphericity(kappa);
    let r = f_p / (1.0 - f_p);
    let bracket = eta / n + (2.0 + 3.0 * r / (n * n)) * eta * eta + 4.0 / 3.0 * (1.0 + 3.0 * r / n) * eta.powi(3);
    Ok((1.0 - f_p) * -(-6.0 * r * bracket).exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // 40-digit evaluations of the closed forms
    const SPHERICITY_310: f64 = 0.188_128_229_048_252_75;
    const ETA_REFERENCE: f64 = 0.442_555_198_008_022_53;
    const F_I_REFERENCE: f64 = 0.166_882_530_944_392_39;

    #[test]
    fn sphericity_reference_value() {
        assert_relative_eq!(sphericity(AspectRatio::new(310.0).unwrap()), SPHERICITY_310, max_relative = 1e-13);
    }

    #[test]
    fn sphericity_sphere_limit() {
        let n = sphericity(AspectRatio::new(1.001).unwrap());
        assert!((n - 1.0).abs() < 1e-3);
    }

    #[test]
    fn aspect_ratio_domain() {
        assert!(AspectRatio::new(1.0).is_err());
        assert!(AspectRatio::new(f64::NAN).is_err());
    }

    #[test]
    fn interphase_fraction_reference() {
        let k = AspectRatio::new(310.0).unwrap();
        let eta = interphase_thickness_ratio(31e-9, 10.35e-9, k);
        assert_relative_eq!(eta, ETA_REFERENCE, max_relative = 1e-13);
        let fi = interphase_volume_fraction(0.01, k, eta).unwrap();
        assert_relative_eq!(fi, F_I_REFERENCE, max_relative = 1e-12);
    }

    #[test]
    fn interphase_fraction_limits() {
        let k = AspectRatio::new(310.0).unwrap();
        assert_eq!(interphase_volume_fraction(0.0, k, 0.4).unwrap(), 0.0);
        assert_eq!(interphase_volume_fraction(0.05, k, 0.0).unwrap(), 0.0);
        assert!(interphase_volume_fraction(1e-9, k, 0.4).unwrap() < 1e-7);
    }

    proptest! {
        #[test]
        fn sphericity_below_one(k in 1.0001f64..1e6) {
            let n = sphericity(AspectRatio::new(k).unwrap());
            prop_assert!(n > 0.0 && n < 1.0);
        }

        #[test]
        fn interphase_fraction_bounded(f in 0.0f64..0.5, k in 1.01f64..2000.0, eta in 0.0f64..3.0) {
            let fi = interphase_volume_fraction(f, AspectRatio::new(k).unwrap(), eta).unwrap();
            prop_assert!(fi >= 0.0 && fi <= 1.0 - f);
        }
    }
}
