//! Command-line front end for the `deh-core` simulations: configuration
//! layering, parameter sweeps and table output.

pub mod commands;
pub mod config;
pub mod emit;
pub mod error;
pub mod sweep;

pub use error::CliError;
