//! Configuration-driven runner for rotor/spin-wave lattice dynamics: JSON
//! configs in, CSV series and JSON metadata out.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod scan;

pub use commands::{run, Command, RunOutput};
pub use config::RunConfig;
pub use error::CliError;
