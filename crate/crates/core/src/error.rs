use thiserror::Error;

use crate::compat::Witness;

/// Errors raised by the measurement, compatibility and model machinery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: max |m - m†| = {deviation:e} exceeds {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("{value} is not an eigenvalue of observable `{observable}`")]
    UnknownOutcome { observable: String, value: f64 },

    #[error("cannot condition on [{observable} = {value}]: probability {probability:e} is zero")]
    ZeroProbability {
        observable: String,
        value: f64,
        probability: f64,
    },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("observables `{a}` and `{b}` are compatible; no witness exists")]
    NoWitness { a: String, b: String },

    #[error("scenario `{0}` is pairwise compatible; nothing obstructs a model")]
    NoObstruction(String),

    #[error(
        "scenario is not pairwise compatible: `{}` and `{}` violate order independence by {:e}",
        .0.pair.0, .0.pair.1, .0.violation
    )]
    Incompatible(Box<Witness>),

    #[error("sample space has {size} points, exceeding the cap of {cap}")]
    Capacity { size: usize, cap: usize },

    #[error("empty state list")]
    EmptyStates,

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("{context}: {source}")]
    At {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wraps the error with a location such as `observables[1].matrix`.
    pub fn at(self, context: impl Into<String>) -> Self {
        Error::At {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error beneath any location context.
    pub fn root(&self) -> &Error {
        match self {
            Error::At { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
