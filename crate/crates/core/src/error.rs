//! Crate-wide error type.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while loading, validating or analysing
/// tables and signals.
///
/// File-shaped variants carry the offending path and, where one exists, the
/// 1-based line number so CLI messages can point at the exact row.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: u64,
        msg: String,
    },

    #[error("{path}: {msg}")]
    File { path: String, msg: String },

    #[error("{path}:{line}: value {value} is not in the domain of `{hyperparam}`")]
    Domain {
        path: String,
        line: u64,
        hyperparam: String,
        value: i64,
    },

    #[error("{path}:{line}: duplicate row for this configuration on dataset `{dataset}`")]
    Duplicate {
        path: String,
        line: u64,
        dataset: String,
    },

    #[error("{path}:{line}: accuracy {value} is outside [0, 1]")]
    Range { path: String, line: u64, value: f64 },

    #[error("invalid hyperparameter space: {0}")]
    InvalidSpace(String),

    #[error("value {value} is not in the domain of `{hyperparam}`")]
    ValueNotInDomain { hyperparam: String, value: i64 },

    #[error("configuration has {got} values but the space has {expected} hyperparameters")]
    ConfigLength { expected: usize, got: usize },

    #[error("unknown hyperparameter `{0}`")]
    UnknownHyperparam(String),

    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),

    #[error("input is empty")]
    EmptyInput,

    #[error("dataset `{dataset}` has {count} scored configurations; at least 2 are required")]
    TooFewConfigs { dataset: String, count: usize },

    #[error("tables do not share an identical hyperparameter space")]
    SpaceMismatch,

    #[error("table {index} is missing {missing} entries for dataset `{dataset}`")]
    IncompleteTable {
        index: usize,
        dataset: String,
        missing: usize,
    },

    #[error("source and target hyperparameter are both `{0}`")]
    SameHyperparam(String),

    #[error("no accuracy for configuration {config_index} on dataset `{dataset}`")]
    MissingRows {
        config_index: usize,
        dataset: String,
    },

    #[error("cannot pin `{0}`: {1}")]
    InvalidFixed(String, String),

    #[error("configuration {config_index} has no percentile on dataset `{dataset}`")]
    UnscoredConfig {
        config_index: usize,
        dataset: String,
    },

    #[error("prefix length {k} is outside 1..={m}")]
    OutOfRange { k: usize, m: usize },

    #[error("{0} benchmark(s) provided; leave-one-out needs at least 2")]
    TooFewBenchmarks(usize),

    #[error("invalid landscape spec: {0}")]
    InvalidLandscape(String),

    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("cutoff {cutoff} Hz is outside (0, {nyquist}) Hz")]
    CutoffOutOfRange { cutoff: f64, nyquist: f64 },

    #[error("signal of {len} samples is shorter than the {filter_len}-tap anti-aliasing filter")]
    SignalTooShort { len: usize, filter_len: usize },

    #[error("windows carry no labels; stratified splitting requires labels")]
    UnlabeledWindows,

    #[error("class `{label}` has {count} window(s); at least 2 are required")]
    ClassTooSmall { label: String, count: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
