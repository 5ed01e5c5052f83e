use thiserror::Error;

use crate::engine::Trajectory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} must be a positive real number, got {value}")]
    NonPositive { name: &'static str, value: String },

    #[error("cannot parse {0:?} as a number")]
    Parse(String),

    #[error("invalid arithmetic precision {0}")]
    InvalidPrecision(u32),

    #[error("step count must be at least 1")]
    NoSteps,

    /// A float-mode value left the finite range; `partial` holds every value
    /// computed before index `index`.
    #[error("float overflow at n={index}")]
    Overflow {
        index: i64,
        partial: Box<Trajectory>,
    },

    #[error("float underflow to zero at n={index}")]
    Underflow {
        index: i64,
        partial: Box<Trajectory>,
    },

    #[error("exact value at n={index} needs {bits} bits, budget is {budget}")]
    ExactGrowth {
        index: i64,
        bits: u64,
        budget: u64,
        partial: Option<Box<Trajectory>>,
    },

    #[error("need at least {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("characteristic roots coincide")]
    DegenerateRoots,

    #[error("closed-form denominator vanishes at n={0}")]
    ZeroDenominator(u64),

    #[error("recurrence check failed at position {position}: relative error {error:e}")]
    RecurrenceMismatch { position: usize, error: f64 },

    #[error("tail bound did not fall below tolerance within {0} terms")]
    NonConvergence(usize),
}

impl Error {
    /// The values computed before an arithmetic abort, if any.
    pub fn partial_trajectory(&self) -> Option<&Trajectory> {
        match self {
            Error::Overflow { partial, .. } | Error::Underflow { partial, .. } => Some(partial),
            Error::ExactGrowth { partial, .. } => partial.as_deref(),
            _ => None,
        }
    }

    /// Index at which an arithmetic abort happened.
    pub fn abort_index(&self) -> Option<i64> {
        match self {
            Error::Overflow { index, .. }
            | Error::Underflow { index, .. }
            | Error::ExactGrowth { index, .. } => Some(*index),
            _ => None,
        }
    }
}
