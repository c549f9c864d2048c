//! Parametric finite element schemes for curve shortening flow and curve
//! diffusion of closed curves in `R^d`, with first-order baselines and
//! second-order predictor-corrector time stepping.

pub mod cd;
pub mod csf;
pub mod error;
pub mod fem;
pub mod grid;
pub mod harness;
pub mod linalg;
pub mod manufactured;

pub use error::{Error, Result};
pub use fem::{ElementField, NodalField};
pub use grid::PeriodicGrid;
