use thiserror::Error;

use crate::polynomial::ConstraintReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad class of a failure; the CLI maps each class to an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Constraint,
    Numerical,
    Resource,
    CostGuard,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("jet order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("jet expansion points differ: {left:?} vs {right:?}")]
    CenterMismatch { left: (f64, f64), right: (f64, f64) },
    #[error("reciprocal of a jet with constant term {0:e}: a+b vanishes at the expansion point (R = 0?)")]
    Singular(f64),
    #[error("jet order {have} is below the operator degree {need}")]
    InsufficientOrder { have: usize, need: usize },
    #[error("{what} = {index} is outside {lo}..={hi}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        lo: usize,
        hi: usize,
    },
    #[error("constraint violation: {0}")]
    Constraint(ConstraintReport),
    #[error("mean value {0:e} is not positive; the logarithm is undefined")]
    NonPositiveMean(f64),
    #[error("quadrature did not settle: change {delta:e} after doubling nodes twice")]
    Quadrature { delta: f64 },
    #[error("{0}")]
    Domain(String),
    #[error("sieve limit {requested} exceeds the memory budget of {budget}")]
    Resource { requested: u64, budget: u64 },
    #[error("{what} with y = {y} exceeds the cost guard {limit}; pass an override to run anyway")]
    CostGuard { what: &'static str, y: u64, limit: u64 },
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Constraint(_) => ErrorClass::Constraint,
            Error::Resource { .. } => ErrorClass::Resource,
            Error::CostGuard { .. } => ErrorClass::CostGuard,
            _ => ErrorClass::Numerical,
        }
    }
}
