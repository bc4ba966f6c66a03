use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("class {0} is absent from the data")]
    MissingClass(crate::Label),

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("solver did not converge within {iterations} pair updates (gap {gap:.3e})")]
    NotConverged { iterations: usize, gap: f64 },

    #[error("degenerate model: weight vector is zero")]
    DegenerateModel,

    #[error("degenerate grid: all scores are zero")]
    DegenerateGrid,

    #[error("feature {0} is constant and cannot be min-max normalised")]
    ConstantFeature(usize),

    #[error("degenerate signals: all csm values are zero")]
    DegenerateSignals,

    #[error("dendritic cell population is empty")]
    EmptyPopulation,

    #[error("sample size {n} outside the supported range [{min}, {max}]")]
    SampleSize { n: usize, min: usize, max: usize },

    #[error("sample has zero variance")]
    ZeroVariance,

    #[error("all paired differences are zero")]
    AllDifferencesZero,

    #[error("method {method} failed on dataset {dataset}: {source}")]
    Method {
        method: crate::harness::MethodId,
        dataset: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv { path: path.into(), source }
    }
}
