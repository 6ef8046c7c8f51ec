//! Library side of the `moments` command-line tool.
//!
//! * [`stream_io`] turns text or CSV into `f64` values and cuts them into chunks.
//! * [`commands`] implements `stats`, `parallel`, `compare` and `bench`.
//! * [`estimator`] is the registry of whole-data estimators that `compare` runs side by side.

pub mod commands;
pub mod estimator;
pub mod report;
pub mod rng;
pub mod stream_io;

use moments_core::MomentsError;
use moments_oracles::OracleError;
use stream_io::StreamError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("no data")]
    NoData,
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error(transparent)]
    Moments(#[from] MomentsError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("cannot open {path}: {source}")]
    Open {
        path: String,
        source: std::io::Error,
    },
    #[error("write error: {0}")]
    Write(#[from] std::io::Error),
}

impl CliError {
    /// 2 for usage errors, 1 for everything that went wrong with the data or I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Stream(StreamError::InvalidArgument(_)) => 2,
            _ => 1,
        }
    }
}
