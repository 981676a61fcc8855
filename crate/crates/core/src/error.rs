use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // ingestion
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("empty file")]
    EmptyFile,
    #[error("ragged rows: row {row} has {found} columns, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("non-numeric token {token:?} at row {row}, column {col}")]
    NonNumericToken {
        row: usize,
        col: usize,
        token: String,
    },
    #[error("file {index} is {found_iters}x{found_outputs}, expected {expected_iters}x{expected_outputs}")]
    DimensionMismatch {
        index: usize,
        expected_iters: usize,
        expected_outputs: usize,
        found_iters: usize,
        found_outputs: usize,
    },
    #[error("empty run set")]
    EmptyRunSet,
    #[error("{path}: {source}")]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    // focal measures
    #[error("steady-state index {ss_idx} out of range for series of length {len}")]
    SsIdxOutOfRange { ss_idx: usize, len: usize },
    #[error("iteration {0} out of range")]
    IterOutOfRange(usize),
    #[error("invalid extractor: {0}")]
    InvalidExtractor(String),
    #[error("output index {index} out of range ({n_outputs} outputs)")]
    OutputOutOfRange { index: usize, n_outputs: usize },
    #[error("run {run}, output {output}: {source}")]
    Extract {
        run: usize,
        output: usize,
        #[source]
        source: Box<Error>,
    },

    // numerics
    #[error("argument outside domain: {0}")]
    DomainError(String),
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    // statistics
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("degenerate sample (all values equal)")]
    DegenerateSample,
    #[error("sample size {0} outside the supported range 3..=5000")]
    SampleSizeOutOfRange(usize),

    // comparison
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("focal measure names differ between matrices: {0}")]
    FmNameMismatch(String),
    #[error("focal measure {name}: {source}")]
    InFm {
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("configuration: {0}")]
    Config(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Error {
        Error::InFile {
            path: path.into(),
            source: Box::new(self),
        }
    }
}
