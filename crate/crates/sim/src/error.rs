use thiserror::Error;

pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Core(#[from] notchwave_core::Error),

    #[error("bit count {0} is odd; π/4-DQPSK carries two bits per symbol")]
    OddBitCount(usize),

    #[error("occupied bandwidth {occupied} Hz exceeds the allowed {allowed} Hz")]
    Bandwidth { occupied: f64, allowed: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("symbol synchronization failed: {0}")]
    SyncFailure(String),
}

impl SimError {
    pub fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Self::InvalidParameter { name, reason: reason.into() }
    }
}
