//! Symmetric second- and fourth-order tensors in Voigt notation.
//!
//! Voigt ordering is `(11, 22, 33, 23, 13, 12)` with engineering shear on
//! strain-like vectors. A fourth-order tensor carries a [`TensorKind`] so that
//! conversions to full index form and rotations apply the right shear factors.

pub mod average;
pub mod quadrature;
pub mod rotation;
pub mod sym2;
pub mod voigt;

pub use average::{orientational_average, OrientationGrid};
pub use quadrature::{gauss_legendre, integrate_adaptive, AdaptiveOptions};
pub use rotation::{rotate_tensor4, EulerOrientation};
pub use sym2::SymTensor2;
pub use voigt::{IsotropicParts, Tensor4Voigt, TensorKind};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("quadrature order {0} is below the minimum of 2")]
    QuadratureOrder(usize),
    #[error("adaptive quadrature did not reach tolerance {tol:e} (estimate {estimate:e}, error {error:e})")]
    QuadratureDiverged { tol: f64, estimate: f64, error: f64 },
    #[error("angle {name}={value} outside [{lo}, {hi}]")]
    AngleOutOfRange { name: &'static str, value: f64, lo: f64, hi: f64 },
    #[error("singular {0} tensor")]
    Singular(&'static str),
}
