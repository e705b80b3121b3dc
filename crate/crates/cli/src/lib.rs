//! Config loading, matrix files and table output for the `zenopure`
//! command-line tool.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod experiment;
pub mod matrix_file;

use std::path::PathBuf;

use thiserror::Error;
use zenopure::engine::EngineError;
use zenopure::linalg::LinalgError;
use zenopure::oscillator::OscillatorError;

pub use commands::Report;
pub use config::ExperimentConfig;
pub use experiment::{Experiment, Overrides};

/// Process exit status of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok = 0,
    Degenerate = 2,
    ToleranceBreach = 3,
}

impl Status {
    pub fn code(self) -> u8 {
        self as u8
    }
}

/// Every error maps to exit code 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {message}")]
    MatrixFile { path: PathBuf, message: String },

    #[error(transparent)]
    Oscillator(#[from] OscillatorError),

    #[error(transparent)]
    Engine(#[from] EngineError),

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl CliError {
    pub const EXIT_CODE: u8 = 1;
}
