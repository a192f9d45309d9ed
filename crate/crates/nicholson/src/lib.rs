//! Std companion to `nicholson-core`: JSON model and run files, parallel
//! ensembles, parameter sweeps and the `nicholson` command line.

pub mod cli;
pub mod commands;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod model_json;
pub mod output;
pub mod sweep;

pub use config::{load, Loaded, RunConfig};
pub use error::CliError;
pub use model_json::{parse_model, ModelDoc};
