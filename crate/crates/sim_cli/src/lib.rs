//! Scenario-driven front end for the coupled fracture solver: scenario
//! files, single runs, property sweeps and Monte Carlo ensembles.

use std::path::PathBuf;

pub mod ensemble;
pub mod run;
pub mod scenario;
pub mod setup;
pub mod sweep;

pub use ensemble::{histogram, monte_carlo, Ensemble, HistogramBin, Replicate};
pub use run::{run_case, run_prepared, CurvePoint, RunSummary};
pub use scenario::{parse_scenario, Scenario};
pub use setup::{prepare, Prepared};
pub use sweep::{property_sweep, PropertyRow, PropertyTable, PropsFile};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}{}: {message}", if path.is_empty() { "scenario".to_string() } else { format!("key `{path}`") }, line.map_or(String::new(), |l| format!(" (line {l})")))]
    Schema { path: String, line: Option<usize>, message: String },
    #[error("key `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error(transparent)]
    Fem(#[from] fem_core::FemError),
    #[error(transparent)]
    Elastic(#[from] elastic_homog::ElasticError),
    #[error(transparent)]
    Electro(#[from] electro_homog::ElectroError),
    #[error(transparent)]
    Solver(#[from] coupled_solver::SolverError),
}

impl CliError {
    pub fn invalid(key: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Invalid { key: key.into(), message: message.into() }
    }

    /// 2 for bad input, 3 for solver failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema { .. } | CliError::Invalid { .. } | CliError::Fem(_) | CliError::Elastic(_) | CliError::Electro(_) => 2,
            CliError::Solver(coupled_solver::SolverError::InvalidInput(_)) => 2,
            CliError::Solver(_) => 3,
            CliError::Io { .. } | CliError::Csv { .. } => 1,
        }
    }
}
