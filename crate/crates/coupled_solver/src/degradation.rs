use serde::{Deserialize, Serialize};

/// Residual stiffness and conductivity of fully broken material.
pub const DEFAULT_REGULARIZATION: f64 = 1e-7;

/// Quadratic stiffness degradation `(1 − d)² + ε`.
pub fn h1(d: f64, eps_reg: f64) -> f64 {
    (1.0 - d).powi(2) + eps_reg
}

/// Two-parameter exponential conductivity degradation
/// `(1 − exp(−k (1 − d)ⁿ)) / (1 − exp(−k)) + ε`.
pub fn h2(d: f64, k: f64, n: f64, eps_reg: f64) -> f64 {
    let x = (1.0 - d).max(0.0);
    -(-k * x.powf(n)).exp_m1() / -(-k).exp_m1() + eps_reg
}

/// Shape of the conductivity degradation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConductivityDegradation {
    pub k: f64,
    pub n: f64,
}

impl Default for ConductivityDegradation {
    fn default() -> Self {
        ConductivityDegradation { k: 50.0, n: 6.0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const E: f64 = DEFAULT_REGULARIZATION;

    #[test]
    fn unit_values() {
        assert_eq!(h1(0.0, E), 1.0 + E);
        assert_eq!(h1(1.0, E), E);
        assert_eq!(h1(0.5, E), 0.25 + E);
        assert!((h2(0.0, 50.0, 6.0, E) - (1.0 + E)).abs() < 1e-15);
        assert_eq!(h2(1.0, 50.0, 6.0, E), E);
        // 30-digit evaluation of (1 − exp(−50/64)) / (1 − exp(−50))
        assert!((h2(0.5, 50.0, 6.0, 0.0) - 0.542_166_638_228_385_7).abs() < 1e-15);
        assert!((h2(0.5, 50.0, 6.0, E) - 0.5422).abs() < 1e-4);
    }

    #[test]
    fn monotone_family() {
        for k in [10.0, 50.0, 90.0] {
            for n in [4.0, 6.0, 8.0] {
                let v: Vec<f64> = (0..=1000).map(|i| h2(i as f64 / 1000.0, k, n, E)).collect();
                assert!(v.windows(2).all(|w| w[1] <= w[0]));
            }
        }
    }

    proptest! {
        #[test]
        fn bounded(d in 0.0f64..=1.0, k in 0.1f64..200.0, n in 1.0f64..10.0) {
            let v = h2(d, k, n, E);
            prop_assert!(v >= E && v <= 1.0 + E + 1e-12);
            let w = h1(d, E);
            prop_assert!(w >= E && w <= 1.0 + E);
        }
    }
}
