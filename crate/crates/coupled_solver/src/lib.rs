//! Coupled displacement, electric potential and phase-field damage problem
//! of piezoresistive composites: element kernels, block assembly and a
//! monolithic quasi-Newton load-stepping driver.

pub mod assembly;
pub mod degradation;
pub mod element;
pub mod material;
pub mod solver;

pub use assembly::{Constraint, CoupledProblem, Electrodes, NodalResidual};
pub use degradation::{h1, h2, ConductivityDegradation, DEFAULT_REGULARIZATION};
pub use element::{evaluate_element, strain_matrix, ElementContext, ElementFields, ElementOutput};
pub use material::{MaterialPoint, Piezo};
pub use solver::{run_load_program, settle_potential, solve_step, LoadHistory, NonlinearSolveConfig, StepRecord, StepStats};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("non-finite values in element {element}")]
    NonFinite { element: usize },
    #[error("{block} block could not be factorised: {source}")]
    Factorization { block: &'static str, source: fem_core::FemError },
    #[error("no convergence after {iterations} iterations (relative block residuals {residual:?})")]
    NotConverged { iterations: usize, residual: [f64; 3] },
    #[error("load program aborted at load {load:e}: {source}")]
    Aborted { load: f64, source: Box<SolverError>, partial: Box<LoadHistory> },
    #[error(transparent)]
    Fem(#[from] fem_core::FemError),
    #[error(transparent)]
    Elastic(#[from] elastic_homog::ElasticError),
    #[error(transparent)]
    Electro(#[from] electro_homog::ElectroError),
}
