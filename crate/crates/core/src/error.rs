use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet mismatch: {0} letters vs {1} letters")]
    AlphabetMismatch(usize, usize),
    #[error("letter {letter} outside alphabet of size {width}")]
    InvalidLetter { letter: usize, width: usize },
    #[error("word of length {len} exceeds truncation order {order}")]
    WordTooLong { len: usize, order: usize },
    #[error("tensor with {requested} coefficients exceeds the budget of {budget}")]
    Budget { requested: u128, budget: u128 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("time regression: {next} precedes {current}")]
    TimeRegression { current: f64, next: f64 },
    #[error("path has no samples")]
    EmptyPath,
    #[error("limit at infinity diverges: {0}")]
    Divergent(String),
    #[error("paths differ after the split time {0}")]
    PathsDiffer(f64),
    #[error("truncation order {order} too low, need at least {needed}")]
    TruncationTooLow { order: usize, needed: usize },
    #[error("negative variance {0} beyond clipping tolerance")]
    NegativeVariance(f64),
    #[error("simulation unstable at t = {0}; reduce dt")]
    Unstable(f64),
    #[error("numerical blow-up at t = {0}; try halving dt")]
    BlowUp(f64),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
