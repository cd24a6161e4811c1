use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate index {0:?}")]
    DuplicateIndex(Vec<u32>),
    #[error("index {index:?} out of range for dims {dims:?}")]
    IndexOutOfRange { index: Vec<u32>, dims: Vec<u32> },
    #[error("zero coefficient at index {0:?}")]
    ZeroCoefficient(Vec<u32>),
    #[error("a form needs at least one monomial")]
    EmptyForm,
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("vector for slot {slot} has length {found}, needs at least {needed}")]
    VectorTooShort { slot: usize, needed: usize, found: usize },
    #[error("arity {found} is too small (minimum {min})")]
    ArityTooSmall { min: usize, found: usize },
    #[error("requested {requested} terms but only {capacity} indices exist")]
    TooManyTerms { requested: u128, capacity: u128 },
    #[error("budget exceeded: {required} evaluations required, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("exponent out of range: {0}")]
    ExponentRange(String),
    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),
    #[error("invalid slot order {0:?}")]
    InvalidSlotOrder(Vec<usize>),
    #[error("bound violated: observed {observed} > bound {bound}")]
    BoundViolated { observed: f64, bound: f64 },
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
