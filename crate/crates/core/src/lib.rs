//! Ground states, low-lying spectra and atom-number distributions of two
//! laser-coupled Bose condensates.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adiabatic;
pub mod cli;
pub mod error;
pub mod field;
pub mod optimize;
pub mod params;
pub mod tridiag;
pub mod twomode;
pub mod variational;

pub use error::{Error, Result};
pub use params::{LambdaConvention, ModelParams};
pub use tridiag::TridiagonalHamiltonian;
