//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("csv: missing required column `{0}`")]
    MissingColumn(String),
    #[error("csv line {line}: {msg}")]
    CsvRow { line: u64, msg: String },
    #[error("csv: {0}")]
    Csv(String),
    #[error("xes: {0}")]
    Xes(String),
    #[error("empty log: input contains no traces")]
    EmptyLog,
    #[error("duplicate case id `{0}`")]
    DuplicateCase(String),
    #[error("indicator `{indicator}` failed for case(s): {cases}")]
    Indicator { indicator: String, cases: String },
    #[error("bucket count {b} out of range for a log of {len} traces (need 2 <= b <= {len})")]
    BucketCount { b: usize, len: usize },
    #[error("window size {w} out of range for {b} buckets (need 1 <= w <= {max})", max = b / 2)]
    WindowSize { w: usize, b: usize },
    #[error("oracle supports too large: {m}x{n} exceeds 9 cells")]
    SupportTooLarge { m: usize, n: usize },
    #[error("invalid stochastic language: {0}")]
    InvalidLanguage(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("report failed validation: {0}")]
    InconsistentReport(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Tag an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
