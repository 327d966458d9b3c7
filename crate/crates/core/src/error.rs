use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("variable index {index} out of range for {count} variables")]
    VarIndexOutOfRange { index: usize, count: usize },

    #[error("duplicate variable index {0}")]
    DuplicateVar(usize),

    #[error("variable set must be nonempty")]
    EmptyVarSet,

    #[error("variable sets must be disjoint (index {0} appears in both)")]
    OverlappingVars(usize),

    #[error("conditioning on null event: variable {var} = {value} has probability {prob}")]
    NullEvent { var: usize, value: usize, prob: f64 },

    #[error("arity mismatch: {0}")]
    ArityMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("source does not factorize into a product of its marginals")]
    NonProductSource,

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("invalid sweep config: {0}")]
    InvalidConfig(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed json at {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv error at {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
