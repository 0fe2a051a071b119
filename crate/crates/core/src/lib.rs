//! Semi-tensor product (STP) algebra over the cross-dimensional signal space,
//! and a compressed-sensing toolkit built on it.

pub mod basis;
pub mod bibd;
pub mod cli;
pub mod error;
pub mod exec;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod metrics;
pub mod pipeline;
pub mod random;
pub mod signal_space;
pub mod stp;
pub mod worked_examples;

#[cfg(test)]
mod testutil;

pub use error::{Result, StpError};
pub use exec::{ExecMode, SearchConfig};
pub use matrix::{DenseMatrix, Side, Signal};
