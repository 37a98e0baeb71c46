//! Command-line harness: configuration, scenario runners reproducing the
//! paper's figures, CSV/JSON emission and seed management.

pub mod config;
pub mod error;
pub mod output;
pub mod scenarios;
pub mod seeds;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
