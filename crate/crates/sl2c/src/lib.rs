//! Batch experiments, serialization and a parallel search on top of `sl2c-core`.

pub mod config;
pub mod emit;
pub mod experiment;
pub mod parallel;
pub mod presets;
pub mod record;
pub mod stats;

pub use sl2c_core as core;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] sl2c_core::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
