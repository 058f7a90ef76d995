use thiserror::Error;

/// Errors produced while building schemas, compiling queries, or running the
/// feasibility machinery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),

    #[error("unknown column {0}")]
    UnknownColumn(String),

    #[error("unknown value {value} for column {column}")]
    UnknownValue { column: String, value: String },

    #[error("malformed row: {0}")]
    MalformedRow(String),

    #[error("query error: {0}")]
    Query(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("target out of range: query {id} has count {count}, N = {n}")]
    TargetOutOfRange { id: String, count: i64, n: usize },

    #[error("multiplicity {m} out of range for N = {n}")]
    MultiplicityOutOfRange { m: usize, n: usize },

    #[error("instance too large: {0}")]
    InstanceTooLarge(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
