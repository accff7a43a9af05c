use std::fmt;

use thiserror::Error;

/// Which defining property of a quantum state an input failed.
#[derive(Debug, Clone, PartialEq)]
pub enum StateViolation {
    NotSquare { rows: usize, cols: usize },
    DimensionMismatch { expected: usize, found: usize },
    NotHermitian { residual: f64 },
    TraceNotOne { trace: f64 },
    NotPositive { min_eigenvalue: f64 },
    OutsideCorrelationBall { norm: f64, bound: f64 },
    BlochNormExceeded { norm: f64 },
}

impl fmt::Display for StateViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotSquare { rows, cols } => write!(f, "matrix is not square ({rows}x{cols})"),
            Self::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Self::NotHermitian { residual } => {
                write!(f, "hermiticity violated (max |A - A^H| = {residual:e})")
            }
            Self::TraceNotOne { trace } => write!(f, "unit trace violated (trace = {trace})"),
            Self::NotPositive { min_eigenvalue } => {
                write!(f, "positivity violated (min eigenvalue = {min_eigenvalue:e})")
            }
            Self::OutsideCorrelationBall { norm, bound } => write!(
                f,
                "correlation-ball bound violated (||K||_F = {norm} > {bound})"
            ),
            Self::BlochNormExceeded { norm } => {
                write!(f, "Bloch-vector norm bound violated (||n|| = {norm} > 1)")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("level count must be at least 2 (got {0})")]
    InvalidLevel(usize),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("star/wedge products are undefined for d = 2 (prefactor 1/(d-2))")]
    StarUndefined,

    #[error("matrix is not unitary (residual {residual:e})")]
    NonUnitaryInput { residual: f64 },

    #[error("matrix is not orthogonal (residual {residual:e})")]
    NonOrthogonalInput { residual: f64 },

    #[error("invalid state: {0}")]
    InvalidState(StateViolation),

    #[error("parameters do not describe a state (min eigenvalue {min_eigenvalue:e})")]
    NotAState { min_eigenvalue: f64 },

    #[error("t = {t} outside the admissible range [{lo}, {hi}]")]
    TOutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("parameter {name} = {value} out of range [{lo}, {hi}]")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("disturbance routes disagree (residual {residual:e}); basis or ordering bug")]
    InconsistentDisturbance { residual: f64 },

    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),

    #[error("rejection sampling exhausted after {tries} tries")]
    RejectionExhausted { tries: usize },

    #[error("ensemble {0} is not supported by this experiment")]
    UnsupportedEnsemble(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<StateViolation> for Error {
    fn from(v: StateViolation) -> Self {
        Error::InvalidState(v)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
