use std::path::PathBuf;

use thiserror::Error;

use crate::phi_core::report::ConditionReport;

/// Errors produced by the library.
///
/// The CLI maps these onto exit codes: [`Error::Refused`] is a verdict
/// (code 1), configuration/parse/I/O problems are code 2, and the structural
/// variants (code 3) mean an evaluator or table broke a contract it promised
/// to keep.
#[derive(Debug, Error)]
pub enum Error {
    #[error("evaluator is not monotone at x = {x:?}: phi({t_lo}) = {v_lo} > phi({t_hi}) = {v_hi}")]
    NonMonotone {
        x: Vec<f64>,
        t_lo: f64,
        v_lo: f64,
        t_hi: f64,
        v_hi: f64,
    },
    #[error("evaluator returned NaN at x = {x:?}, t = {t}")]
    NotANumber { x: Vec<f64>, t: f64 },
    #[error("structural error: {0}")]
    Structural(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("adjacency graph is disconnected into {count} components: {components}")]
    Disconnected { count: usize, components: String },
    #[error("extension refused: {} does not hold ({})", .0.condition, .0.detail)]
    Refused(Box<ConditionReport>),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
