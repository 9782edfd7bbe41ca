//! Mean-force Gibbs states of a finite system coupled to discretized
//! anharmonic environments, and their ultrastrong-coupling limits.
//!
//! The crate is organised as
//! - [`linalg`]: Hermitian operators, spectral functions, partial traces and
//!   trace distances,
//! - [`models`]: system data, environment grids and coupled Hamiltonians,
//! - [`engine`]: exact reduced states and grid convergence,
//! - [`usc`]: closed-form ultrastrong-coupling states,
//! - [`props`]: numerical checks of the path inequalities.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod error;
pub mod linalg;
pub mod models;
pub mod props;
pub mod usc;

pub use error::{Error, Result};
