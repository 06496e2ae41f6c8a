use thiserror::Error;

/// Errors produced by the hybrid maser toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty operand list")]
    EmptyOperands,

    #[error("unknown subsystem {0:?} for this operator layout")]
    UnknownSubsystem(crate::operator::Subsystem),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("scalar map is singular at eigenvalue {0} and declares no removable limit")]
    SingularFunction(f64),

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("steady state is not unique: null space has dimension {0}")]
    AmbiguousSteadyState(usize),

    #[error("adaptive step size underflow at t = {0}")]
    Stiffness(f64),

    #[error("truncation too small: {0}")]
    Truncation(String),

    #[error("statistics undefined: {0}")]
    UndefinedStatistics(String),

    #[error("formula diverges: {0}")]
    Divergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
