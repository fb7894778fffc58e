use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid extension degree {0}")]
    InvalidDegree(u32),
    #[error("modulus {0} must be a prime greater than 3")]
    InvalidModulus(u64),
    #[error("field of order {0} does not fit in a machine word")]
    FieldTooLarge(String),
    #[error("polynomial is not irreducible")]
    Reducible,
    #[error("curve is singular")]
    SingularCurve,
    #[error("trace {trace} violates the Hasse bound for q = {q}")]
    InvalidTrace { trace: i64, q: u64 },
    #[error("surface has identically vanishing discriminant")]
    DegenerateSurface,
    #[error("discriminant vanishes identically modulo {0}")]
    BadSurfaceReduction(u64),
    #[error("surface is isotrivial")]
    IsotrivialSurface,
    #[error("inconsistent data: {0}")]
    InconsistentData(String),
    #[error("search space of size {size} exceeds the budget {budget}")]
    SearchTooLarge { size: u128, budget: u128 },
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numeric overflow: {0}")]
    Overflow(String),
    #[error("checkpoint error at byte offset {offset}: {reason}")]
    Checkpoint { offset: u64, reason: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
