use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("cannot open {path}: {source}")]
    Open { path: PathBuf, source: io::Error },

    #[error("missing mandatory column `{column}` (role {role}) in header")]
    MissingColumn { role: &'static str, column: String },

    #[error("IBAN aggregation requested but {unusable} row(s) lack sender or receiver IBAN")]
    MissingIban { unusable: usize },

    #[error("no transactions to aggregate")]
    NoTransactions,

    #[error("unknown level token `{token}` at line {line}")]
    UnknownLevel { token: String, line: u64 },

    #[error("invalid edge {src}->{dst}: {reason}")]
    InvalidEdge { src: String, dst: String, reason: String },

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("layer `{0}` is empty")]
    EmptyLayer(String),

    #[error("empty seed set")]
    EmptySeed,

    #[error("{algorithm} did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        algorithm: &'static str,
        iterations: usize,
        residual: f64,
        last: Vec<f64>,
    },

    #[error("{0} has no edges; the iterate collapsed to zero")]
    ZeroIterate(&'static str),

    #[error("node sets differ between the compared rankings")]
    NodeSetMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("rewiring failed: {0}")]
    Rewire(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("unknown interval `{0}`")]
    UnknownInterval(String),

    #[error("need at least {needed} layers, got {got}")]
    TooFewLayers { needed: usize, got: usize },

    #[error("zipf fit needs at least 3 positive values, got {0}")]
    ZipfTooFewValues(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn open_file(path: &std::path::Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|source| Error::Open {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn create_file(path: &std::path::Path) -> Result<std::fs::File> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::File::create(path).map_err(|source| Error::Open {
        path: path.to_path_buf(),
        source,
    })
}
