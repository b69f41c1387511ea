//! Config files, on-disk formats and the experiment stages behind the
//! `sgmor` command line tool. The numerics live in `sgmor_core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod model;

pub use config::{ExperimentConfig, Overrides, ReducerKind};
pub use error::{CliError, Result};
