//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("duplicate qubit label `{0}` in register")]
    DuplicateLabel(String),

    #[error("unknown qubit label `{0}`")]
    UnknownLabel(String),

    #[error("gate arity {gate} does not match {targets} target qubit(s)")]
    ArityMismatch { gate: usize, targets: usize },

    #[error("register must contain at least one qubit")]
    EmptyRegister,

    #[error("measured label set must not be empty")]
    EmptyMeasurement,

    #[error("superposition requires at least one term")]
    EmptyTerms,

    #[error("all superposition coefficients are zero")]
    AllZeroCoefficients,

    #[error("gate `{name}` is not unitary (max |U\u{2020}U - I| = {deviation:.3e})")]
    NonUnitaryGate { name: String, deviation: f64 },

    #[error("states are defined over different qubit labels")]
    LabelMismatch,

    #[error("expected a register of {expected} qubit(s), got {got}")]
    WrongRegisterSize { expected: usize, got: usize },

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("singular cavity parameters: reflection denominator modulus {modulus:.3e} < 1e-15")]
    SingularParameters { modulus: f64 },

    #[error("reflection is lossy (min modulus {min_modulus}); rejected by gate spec")]
    LossyGateRejected { min_modulus: f64 },

    #[error(
        "phases carry non-unit modulus {min_modulus}; pass an explicit lossy acknowledgment to proceed"
    )]
    LossyPhases { min_modulus: f64 },

    #[error("invalid {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    pub fn invalid(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
