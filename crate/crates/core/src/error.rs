use thiserror::Error;

use crate::time::YearMonth;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse grouping of errors, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorFamily {
    Io,
    Format,
    Coverage,
    Parameter,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error at row {row}: {message}")]
    Format { row: usize, message: String },

    #[error("gap in monthly series: expected {expected}, found {found}")]
    Gap { expected: YearMonth, found: YearMonth },

    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("deflator is zero at {0}")]
    DegenerateBase(YearMonth),

    #[error("every observation was excised")]
    EmptySeries,

    #[error("unknown country: {0}")]
    UnknownCountry(String),

    #[error("rank deficient system: {0}")]
    Rank(String),

    #[error("ill-conditioned system: {0}")]
    Conditioning(String),

    #[error("series too short: need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("expected values too close to zero at indices {indices:?}")]
    DivisionByNearZero { indices: Vec<usize> },
}

impl Error {
    pub fn family(&self) -> ErrorFamily {
        match self {
            Error::Io(_) => ErrorFamily::Io,
            Error::Format { .. } => ErrorFamily::Format,
            Error::Gap { .. } | Error::Coverage(_) | Error::EmptySeries => ErrorFamily::Coverage,
            Error::UnknownCountry(_) | Error::TooShort { .. } | Error::Param(_) => {
                ErrorFamily::Parameter
            }
            Error::DegenerateBase(_)
            | Error::Rank(_)
            | Error::Conditioning(_)
            | Error::Degenerate(_)
            | Error::DivisionByNearZero { .. } => ErrorFamily::Numerical,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }

    pub(crate) fn format(row: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            row,
            message: msg.into(),
        }
    }
}
