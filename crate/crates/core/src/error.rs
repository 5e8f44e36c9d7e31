use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sequence must contain at least one sample")]
    EmptySequence,

    #[error("sample {index} is not finite")]
    NonFiniteSample { index: usize },

    #[error("invalid frequency {0}: normalized frequency must lie in [0, 1)")]
    InvalidFrequency(f64),

    #[error("invalid stop band [{f_lo}, {f_hi}]: {reason}")]
    InvalidBand { f_lo: f64, f_hi: f64, reason: String },

    #[error("stop band [{f_lo}, {f_hi}] contains no point of the {n}-point frequency grid")]
    EmptyBand { f_lo: f64, f_hi: f64, n: usize },

    #[error("stop bands {first} and {second} overlap on the {n}-point grid")]
    OverlappingBands { first: usize, second: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("window {window} is infeasible: {reason}")]
    Infeasible { window: usize, reason: String },

    #[error("sample {index} has a component outside [-1, 1] ({value}); normalize to full scale first")]
    OutOfRange { index: usize, value: f64 },

    #[error("signal is identically zero")]
    ZeroSignal,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
