//! Batch front-end for the `bucketwheel` simulator: TOML scenario files in,
//! CSV tables and a gnuplot script out.

pub mod commands;
pub mod config;
pub mod error;
pub mod plot;

pub use error::CliError;
