//! Self-similar solutions of mKdV in Fourier variables.
//!
//! The crate evaluates the trilinear operators `I = J(h, K(f, g)) / 2`, builds the
//! two-term ansatz `S_A`, solves the remainder fixed point, integrates the
//! Painleve II profile in physical space and cross-checks the two sides.

pub mod ansatz;
pub mod cli;
pub mod core_model;
pub mod error;
pub mod fixedpoint;
pub mod numerics;
pub mod oscquad;
pub mod painleve;
pub mod specfun;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
