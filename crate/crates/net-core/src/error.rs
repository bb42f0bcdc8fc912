use thiserror::Error;

/// Broad failure class, used by callers to map errors onto exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad arguments or option combinations.
    Config,
    /// Unreadable or malformed input data.
    Data,
    /// A numerical routine could not produce a valid result.
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {context} ({left} vs {right})")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed table in {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },

    #[error("non-numeric value {value:?} at data row {row}, column {column}")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("label {value:?} at data row {row} is not a positive integer")]
    BadLabel { row: usize, value: String },

    #[error("column {0:?} not found in header")]
    MissingColumn(String),

    #[error("matrix not positive definite after {attempts} jitter escalations (last jitter {last_jitter:e})")]
    NotPositiveDefinite { attempts: usize, last_jitter: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("eigensolver failed at iteration {iteration}: {source}")]
    EigenAtIteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("infeasible constraint set: {0}")]
    Infeasible(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidArgument(_) | Error::DimensionMismatch { .. } => ErrorKind::Config,
            Error::Io { .. }
            | Error::Csv { .. }
            | Error::NonNumeric { .. }
            | Error::BadLabel { .. }
            | Error::MissingColumn(_) => ErrorKind::Data,
            Error::NotPositiveDefinite { .. }
            | Error::Numerical(_)
            | Error::EigenAtIteration { .. }
            | Error::Infeasible(_) => ErrorKind::Numeric,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
