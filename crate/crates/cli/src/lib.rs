//! Library side of the `twisted` command-line tool: configuration, checks,
//! sweeps and file emission. The binary in `main.rs` is a thin clap layer.

pub mod checks;
pub mod commands;
pub mod config;
pub mod context;
pub mod error;
pub mod output;

pub use config::RunConfig;
pub use error::{CliError, CliResult};
