//! Error types for section algebra and machine execution.

use thiserror::Error;

/// Errors raised by section-level operations (restriction, gluing, evaluation).
#[derive(Debug, Clone, Error, PartialEq)]
pub enum SectionError {
    #[error("invalid duration: {0}")]
    InvalidDuration(f64),

    #[error("restriction window [{from}, {to}] out of bounds for length {length}")]
    WindowOutOfBounds { from: f64, to: f64, length: f64 },

    #[error("invalid section: {0}")]
    InvalidSection(String),

    #[error("incompatible sections at splice point: {0}")]
    Incompatible(String),

    #[error("evaluation point {t} outside [0, {length}]")]
    EvalOutOfRange { t: f64, length: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: f64, right: f64 },
}

/// Errors raised when constructing or running machines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum MachineError {
    #[error("type mismatch: expected {expected}, got {got}")]
    TypeMismatch { expected: String, got: String },

    #[error("non-finite value in section near t = {t}")]
    NonFinite { t: f64 },

    #[error("state diverged (non-finite) at t = {t}")]
    Divergence { t: f64 },

    #[error("loop is not inertial: traced machine with zero loop delay is rejected")]
    NonCausalLoop,

    #[error("loop constraint violated on [{t0}, {t1}]: loop output depends on loop input within the declared delay")]
    LoopConstraint { t0: f64, t1: f64 },

    #[error("invalid machine parameter: {0}")]
    InvalidParameter(String),

    #[error("input domain violation at t = {t}: {what}")]
    DomainViolation { t: f64, what: String },

    #[error(transparent)]
    Section(#[from] SectionError),
}
