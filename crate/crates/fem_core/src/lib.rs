//! Finite-element infrastructure for coupled displacement, potential and
//! damage fields on structured quadrilateral and hexahedral meshes.

pub mod builder;
pub mod defects;
pub mod dofmap;
pub mod io;
pub mod mesh;
pub mod ordering;
pub mod shape;
pub mod skyline;
pub mod state;

pub use builder::{build_structured_mesh, AxisSpec, DomainShape, Feature, GridSpec, NotchMode};
pub use defects::{random_defect_sampler, DefectRegion, RadiusDistribution};
pub use dofmap::{Block, DofMap};
pub use mesh::{ElementKind, Mesh};
pub use shape::{shape_eval, IntegrationCache, QuadPoint, ShapeValues};
pub use skyline::{SkylineCholesky, SkylineMatrix};
pub use state::FieldState;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FemError {
    #[error("invalid mesh specification: {0}")]
    InvalidSpec(String),
    #[error("{feature} of size {size:e} m is smaller than twice the local element size {h:e} m")]
    FeatureTooSmall { feature: &'static str, size: f64, h: f64 },
    #[error("{0} lies outside the domain")]
    FeatureOutside(&'static str),
    #[error("non-positive Jacobian {det:e} in element {element}")]
    NonPositiveJacobian { element: usize, det: f64 },
    #[error("defect sampler could not reach area {target:e} m² within {attempts} draws (reached {reached:e})")]
    SamplerExhausted { target: f64, reached: f64, attempts: usize },
    #[error("matrix not positive definite at pivot {0}")]
    NotPositiveDefinite(usize),
    #[error("mesh file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
