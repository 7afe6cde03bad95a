//! Shared domain types: configuration, grids, sampled fields and norms.

pub mod config;
pub mod field;
pub mod grid;
pub mod io;
pub mod norm;

pub use config::{BoundaryData, ModelConfig};
pub use field::{eval_field, ripple_carrier, sample_field, Field, FnField, SpectralField, SumField, TailModel, ZeroField, C3};
pub use grid::{make_grid, resolved_refinement};
pub use norm::{zk_norm, NormPieces, NormReport};
