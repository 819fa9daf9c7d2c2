//! Effective electrical conductivity of CNT composites from electron hopping
//! and conductive networking, its strain dependence (filler dilution,
//! reorientation and threshold shift) and the resulting linear
//! piezoresistivity coefficients.

pub mod conductivity;
pub mod percolation;
pub mod piezo;
pub mod tunneling;

pub use conductivity::{effective_conductivity, ConductionState, ElectroOptions};
pub use elastic_homog::mass_to_volume_fraction;
pub use percolation::{
    percolated_fraction, percolation_threshold, percolation_threshold_with, strained_odf, strained_volume_fraction, OrientationDensity,
    ThresholdQuadrature,
};
pub use piezo::{piezoresistivity_coeffs, piezoresistivity_coeffs_with_step, resistivity_update, PiezoCoefficients};
pub use tunneling::{
    equivalent_cylinder, eshelby_electrical, interphase_layer, tunneling_resistance, Channel, EquivalentCylinder,
    InterphaseLayer, TunnelingParams,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElectroError {
    #[error("{0} outside the formula domain")]
    Domain(String),
    #[error("principal stretch {0} is not positive")]
    NonPositiveStretch(f64),
    #[error("networking channel requested below the percolation threshold (f_p={f_p}, f_c={f_c})")]
    BelowThreshold { f_p: f64, f_c: f64 },
    #[error("percolation-threshold quadrature not converged: relative change {change:e} between orders {low} and {high}")]
    ThresholdNotConverged { change: f64, low: usize, high: usize },
    #[error("finite-difference {coefficient} changed by {change:.3}% between step {step:e} and its half")]
    FiniteDifference { coefficient: &'static str, step: f64, change: f64 },
    #[error("singular {0}")]
    Singular(&'static str),
    #[error(transparent)]
    Elastic(#[from] elastic_homog::ElasticError),
    #[error(transparent)]
    Tensor(#[from] tensorlab::TensorError),
}
