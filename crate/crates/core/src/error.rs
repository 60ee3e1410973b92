use num_complex::Complex64;
use thiserror::Error;

use crate::quadrature::IntegralEstimate;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument {0} is a pole of Gamma")]
    PoleArgument(Complex64),
    #[error("power with zero base")]
    ZeroBase,
    #[error("non-finite input {0}")]
    NonFinite(Complex64),
    #[error("numerator factor {factor} hits a pole at the evaluation point")]
    NumeratorPole { factor: usize },
    #[error("integrand does not decay along axis {axis} (rate {rate})")]
    NonDecaying { axis: usize, rate: f64 },
    #[error("axis {axis} cannot be eliminated from a {dim}-dimensional integrand")]
    BadAxis { axis: usize, dim: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("no feasible straight contour: {}", violations.join("; "))]
    Infeasible { violations: Vec<String> },
    #[error("contour violates pole separation: {}", violations.join("; "))]
    ContourViolation { violations: Vec<String> },
    #[error("quadrature did not converge (best relative change {:.3e})", estimate.rel_error)]
    NoConvergence { estimate: Box<IntegralEstimate> },
    #[error("node budget of {budget} exceeded (next level needs {needed})")]
    BudgetExceeded { budget: u64, needed: u64 },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("unknown identity '{0}'")]
    UnknownIdentity(String),
    #[error("parameter schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("parameter constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("right-hand side has a pole at these parameters")]
    RhsPole,
    #[error("residue series cannot be summed: {0}")]
    SeriesDivergent(String),
    #[error("spin s = {0} must exceed 1/2")]
    BadSpin(f64),
    #[error("parameters outside the convergence domain: {0}")]
    DomainViolation(String),
    #[error("no cached runs found in {0}")]
    EmptyCache(String),
    #[error("invalid quadrature configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
