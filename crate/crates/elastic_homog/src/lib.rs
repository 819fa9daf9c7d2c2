//! Effective elastic stiffness of a three-phase (matrix, soft interphase,
//! filler) composite by a double-inclusion Mori–Tanaka scheme, and the
//! matrix-plus-bridging fracture energy from fibre pull-out and rupture.

pub mod eshelby;
pub mod fracture;
pub mod geometry;
pub mod spec;
pub mod stiffness;

pub use eshelby::eshelby_elastic;
pub use fracture::{bridging_work, critical_length, fracture_energy, orientation_density};
pub use geometry::{interphase_thickness_ratio, interphase_volume_fraction, sphericity, AspectRatio};
pub use spec::{mass_to_volume_fraction, CompositeSpec};
pub use stiffness::{effective_stiffness, EffectiveElastic};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElasticError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidSpec { field: &'static str, reason: String },
    #[error("{0} outside the formula domain")]
    Domain(String),
    #[error("stiffness contrast of the {0} phase against the matrix is singular")]
    PhaseContrast(&'static str),
    #[error("singular {0}")]
    Singular(&'static str),
    #[error("orientation density over [{lo}, {hi}] has zero mass")]
    DegenerateOrientation { lo: f64, hi: f64 },
    #[error(transparent)]
    Tensor(#[from] tensorlab::TensorError),
}
