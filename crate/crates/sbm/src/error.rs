//! Crate-wide error type.
//!
//! Every module reports failures through [`Error`]; the [`ErrorClass`]
//! partition is what command-line callers map onto exit statuses.

use thiserror::Error;

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input: out-of-range parameter, malformed file, violated precondition.
    Usage,
    /// A verification / comparability check failed.
    Verification,
    /// Scaling certification failed.
    Certification,
    /// A numerical method did not converge or produced an invalid value.
    Numerics,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter for family `{family}`: {message}")]
    InvalidParams { family: String, message: String },

    #[error("domain error in `{op}`: {message}")]
    Domain { op: String, message: String },

    #[error("precondition violated in `{op}`: {message}")]
    Precondition { op: String, message: String },

    #[error("scaling certification failed ({side}): {message}")]
    CertificationFailed { side: String, message: String },

    #[error("numerical non-convergence in `{op}`: {message}")]
    NonConvergence { op: String, message: String },

    #[error("inversion produced a negative value at t={t}: {value} (complete monotonicity of `{label}` is violated or the method failed)")]
    NegativeInversion { label: String, t: f64, value: f64 },

    #[error("transform `{label}` has no complex-plane evaluator; the Talbot method needs one")]
    ComplexUnavailable { label: String },

    #[error("process is not transient for d={d}: {message}")]
    NotTransient { d: u32, message: String },

    #[error("no estimate regime applies: {message}")]
    RegimeUnavailable { message: String },

    #[error("verification failed: {message}")]
    VerificationFailed { message: String },

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(op: &str, message: impl Into<String>) -> Self {
        Error::Domain {
            op: op.to_string(),
            message: message.into(),
        }
    }

    pub fn precondition(op: &str, message: impl Into<String>) -> Self {
        Error::Precondition {
            op: op.to_string(),
            message: message.into(),
        }
    }

    pub fn non_convergence(op: &str, message: impl Into<String>) -> Self {
        Error::NonConvergence {
            op: op.to_string(),
            message: message.into(),
        }
    }

    /// Which exit-status class this error belongs to.
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParams { .. }
            | Error::Domain { .. }
            | Error::Precondition { .. }
            | Error::Serde(_)
            | Error::Io(_) => ErrorClass::Usage,
            Error::CertificationFailed { .. } => ErrorClass::Certification,
            Error::VerificationFailed { .. } => ErrorClass::Verification,
            Error::NonConvergence { .. }
            | Error::NegativeInversion { .. }
            | Error::ComplexUnavailable { .. }
            | Error::NotTransient { .. }
            | Error::RegimeUnavailable { .. } => ErrorClass::Numerics,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
