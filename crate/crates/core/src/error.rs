use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sequence {values:?} is not an admissible tau-function")]
    Inadmissible { values: Vec<usize> },

    #[error("{value} is not an admissible extension of a prefix of length {len}")]
    InadmissibleExtension { len: usize, value: usize },

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("prefix length {0} exceeds the supported maximum")]
    TooLong(usize),

    #[error("period {0} is outside the supported range")]
    UnsupportedPeriod(usize),

    #[error("{values:?} is not a minimal prefix of a period-{period} tau-function: {reason}")]
    NotPeriodic {
        values: Vec<usize>,
        period: usize,
        reason: &'static str,
    },

    #[error("{level} is not a non-zero marked level")]
    NotMarkedLevel { level: usize },

    #[error("period {k} does not divide {p}")]
    NotDivisor { k: usize, p: usize },

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("twist factor 2^{marked} / {twist_period} is not an integer for {values:?}")]
    NonIntegralTwistFactor {
        values: Vec<usize>,
        marked: u32,
        twist_period: u64,
    },

    #[error("marked level {level} exceeds p-1 for period-{period} tau {values:?}")]
    MarkedLevelTooHigh {
        values: Vec<usize>,
        period: usize,
        level: usize,
    },

    #[error("inventory has no entry for divisor {0}")]
    MissingDivisor(usize),

    #[error("degree check failed for period {period}: sum of m*Ends = {sum}, degree = {degree}")]
    DegreeMismatch {
        period: usize,
        sum: u64,
        degree: u64,
    },

    #[error("exception families disagree with the enumeration for period {period}")]
    ExceptionMismatch { period: usize },

    #[error("checkpoint {path}: line {line}: {reason}")]
    Checkpoint {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("run stopped with {pending} work items pending; resume from the checkpoint")]
    Interrupted { pending: usize },

    #[error("{0}")]
    Usage(String),

    #[error("sink rejected tau-function: {0}")]
    Sink(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
