//! Batch entry points behind the `hesimd` binary: MatMult benchmarks,
//! complexity verification, dataset generation and training runs.

pub mod bench;
pub mod config;
pub mod error;
pub mod report;
pub mod train;
pub mod verify;

pub use error::{CliError, Result};
