use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::ElasticError;

/// Constituent and micromechanical parameters of a CNT/polymer composite.
/// All quantities in SI units except the tunnelling barrier height (eV).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositeSpec {
    /// Unstrained filler volume fraction.
    pub f_p0: f64,
    /// Filler length (m).
    pub l_cnt: f64,
    /// Filler outer diameter (m).
    pub d_cnt: f64,
    /// Elastic interphase thickness (m).
    pub t_interphase: f64,
    pub e_m: f64,
    pub e_i: f64,
    pub e_cnt: f64,
    pub nu_m: f64,
    pub nu_cnt: f64,
    /// Interphase Poisson ratio; defaults to the matrix value.
    #[serde(default)]
    pub nu_i: Option<f64>,
    /// Filler tensile strength (Pa).
    pub sigma_ult: f64,
    /// Interfacial shear strength (Pa).
    pub tau_int: f64,
    /// Snubbing friction coefficient.
    #[serde(default)]
    pub mu_snub: f64,
    /// Inclined-fibre strength constant.
    pub a_incl: f64,
    #[serde(default)]
    pub theta_min: f64,
    #[serde(default = "default_theta_max")]
    pub theta_max: f64,
    #[serde(default = "half")]
    pub p_shape: f64,
    #[serde(default = "half")]
    pub q_shape: f64,
    /// Fracture energy of the neat matrix (J/m²).
    pub g0: f64,
    /// Tunnelling cut-off distance (m).
    pub d_c: f64,
    /// Tunnelling barrier height (eV).
    pub lambda_barrier: f64,
    /// Filler electrical conductivity (S/m).
    pub sigma_cnt: f64,
    /// Matrix electrical conductivity (S/m).
    pub sigma_m: f64,
}

fn default_theta_max() -> f64 {
    FRAC_PI_2
}

fn half() -> f64 {
    0.5
}

impl CompositeSpec {
    /// MWCNT/epoxy reference material at 1 vol.%.
    pub fn mwcnt_epoxy() -> Self {
        CompositeSpec {
            f_p0: 0.01,
            l_cnt: 3.21e-6,
            d_cnt: 10.35e-9,
            t_interphase: 31e-9,
            e_m: 2.5e9,
            e_i: 2.17e9,
            e_cnt: 700e9,
            nu_m: 0.28,
            nu_cnt: 0.3,
            nu_i: None,
            sigma_ult: 35e9,
            tau_int: 47e6,
            mu_snub: 0.0,
            a_incl: 0.083,
            theta_min: 0.0,
            theta_max: FRAC_PI_2,
            p_shape: 0.5,
            q_shape: 0.5,
            g0: 133.0,
            d_c: 0.22e-9,
            lambda_barrier: 0.69,
            sigma_cnt: 100.0,
            sigma_m: 1.036e-10,
        }
    }

    /// DWCNT/DGEBA material used for the tensile dog-bone comparison, at 0.5 wt.%.
    pub fn dwcnt_dgeba() -> Self {
        CompositeSpec {
            f_p0: mass_to_volume_fraction(0.005, DWCNT_DENSITY, DGEBA_DENSITY),
            l_cnt: 5.39e-6,
            d_cnt: 1.203e-9,
            t_interphase: 31e-9,
            e_m: 2.79e9,
            e_i: 2.24e9,
            e_cnt: 950e9,
            nu_m: 0.285,
            nu_cnt: 0.3,
            nu_i: None,
            sigma_ult: 120e9,
            tau_int: 47e6,
            mu_snub: 0.0,
            a_incl: 0.083,
            theta_min: 0.0,
            theta_max: FRAC_PI_2,
            p_shape: 0.5,
            q_shape: 0.5,
            g0: 220.0,
            d_c: 2.739e-9,
            lambda_barrier: 1.93,
            sigma_cnt: 764.91,
            sigma_m: 1e-12,
        }
    }

    pub fn with_volume_fraction(mut self, f: f64) -> Self {
        self.f_p0 = f;
        self
    }

    pub fn aspect_ratio(&self) -> f64 {
        self.l_cnt / self.d_cnt
    }

    pub fn interphase_poisson(&self) -> f64 {
        self.nu_i.unwrap_or(self.nu_m)
    }

    /// Checks every stated parameter range.
    pub fn validate(&self) -> Result<(), ElasticError> {
        let bad = |field: &'static str, reason: String| Err(ElasticError::InvalidSpec { field, reason });
        let positive = [
            ("l_cnt", self.l_cnt),
            ("d_cnt", self.d_cnt),
            ("t_interphase", self.t_interphase),
            ("e_m", self.e_m),
            ("e_i", self.e_i),
            ("e_cnt", self.e_cnt),
            ("sigma_ult", self.sigma_ult),
            ("tau_int", self.tau_int),
            ("g0", self.g0),
            ("d_c", self.d_c),
            ("lambda_barrier", self.lambda_barrier),
            ("sigma_cnt", self.sigma_cnt),
            ("sigma_m", self.sigma_m),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return bad(name, format!("must be positive, got {v}"));
            }
        }
        if !(0.0..1.0).contains(&self.f_p0) {
            return bad("f_p0", format!("must lie in [0, 1), got {}", self.f_p0));
        }
        for (name, v) in [("nu_m", self.nu_m), ("nu_cnt", self.nu_cnt), ("nu_i", self.interphase_poisson())] {
            if !(v > -1.0 && v < 0.5) {
                return bad(name, format!("must lie in (-1, 0.5), got {v}"));
            }
        }
        if self.l_cnt <= self.d_cnt {
            return bad("l_cnt", "filler must be longer than its diameter".into());
        }
        if !(0.0 <= self.theta_min && self.theta_min < self.theta_max && self.theta_max <= FRAC_PI_2 + 1e-12) {
            return bad("theta_max", format!("need 0 <= theta_min < theta_max <= pi/2, got [{}, {}]", self.theta_min, self.theta_max));
        }
        if self.p_shape < 0.5 || self.q_shape < 0.5 {
            return bad("p_shape", "shape exponents must be >= 1/2".into());
        }
        if !(self.mu_snub.is_finite() && self.mu_snub >= 0.0) {
            return bad("mu_snub", format!("must be non-negative, got {}", self.mu_snub));
        }
        if !(self.a_incl.is_finite() && self.a_incl >= 0.0) {
            return bad("a_incl", format!("must be non-negative, got {}", self.a_incl));
        }
        Ok(())
    }
}

/// Filler density (kg/m³) for the dog-bone material.
pub const DWCNT_DENSITY: f64 = 1350.0;
/// Matrix density (kg/m³) for the dog-bone material.
pub const DGEBA_DENSITY: f64 = 1150.0;

/// Two-phase mass-to-volume fraction conversion.
pub fn mass_to_volume_fraction(w: f64, rho_filler: f64, rho_matrix: f64) -> f64 {
    let vf = w / rho_filler;
    vf / (vf + (1.0 - w) / rho_matrix)
}
