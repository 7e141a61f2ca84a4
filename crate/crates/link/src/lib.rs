//! Experiment driver for `msc-core`: code files, corpora, the correction service
//! client, SNR sweeps, CSV curves and training-pair export.

pub mod alist;
pub mod bart;
pub mod config;
pub mod corpus;
pub mod curves;
pub mod pairs;
pub mod sweep;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Alist(#[from] alist::AlistError),
    #[error(transparent)]
    Code(#[from] msc_core::CodeError),
    #[error(transparent)]
    Trial(#[from] msc_core::pipeline::TrialError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
