use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("signal is empty")]
    EmptySignal,
    #[error("sample {index} is not finite")]
    NonFinite { index: usize },
    #[error("signal length {len} is odd; drop the final sample before transforming")]
    OddLength { len: usize },
    #[error("signal length {len} is too short (need at least {min})")]
    TooShort { len: usize, min: usize },
    #[error("spectrum value at bin {index} is negative or not finite")]
    InvalidSpectrum { index: usize },
    #[error("spectrum has zero total power")]
    ZeroPower,
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("symmetric eigensolver did not converge on a {n}x{n} matrix")]
    EigenNoConvergence { n: usize },
    #[error("samples have zero variance")]
    DegenerateSamples,
    #[error("local energy at index {at} needs {window} samples of history")]
    InsufficientHistory { at: usize, window: usize },
}

/// Coarse grouping of [`Error`] used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// A caller-supplied parameter is out of its domain.
    Parameter,
    /// The input data violates a structural requirement.
    Data,
    /// A computation could not produce a defined value.
    Numeric,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidParameter { .. } => ErrorCategory::Parameter,
            Error::EmptySignal
            | Error::NonFinite { .. }
            | Error::OddLength { .. }
            | Error::TooShort { .. }
            | Error::InvalidSpectrum { .. }
            | Error::InsufficientHistory { .. } => ErrorCategory::Data,
            Error::ZeroPower | Error::EigenNoConvergence { .. } | Error::DegenerateSamples => {
                ErrorCategory::Numeric
            }
        }
    }
}
