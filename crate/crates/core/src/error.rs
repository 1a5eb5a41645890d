use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("quadrature order {0} outside the supported range 1..=512")]
    OrderOutOfRange(usize),

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("quadrature order {order} is too small for degree {degree} (need at least {required})")]
    InsufficientOrder {
        order: usize,
        degree: usize,
        required: usize,
    },

    #[error("polynomial index {index} exceeds the limit {limit}")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("operator order k = {k} exceeds truncation degree {degree}")]
    OrderExceedsDegree { k: usize, degree: usize },

    #[error("operator order must be at least 1")]
    ZeroOrder,

    #[error("alpha = 0 makes the operator degenerate")]
    DegenerateAlpha,

    #[error("|alpha| = {0} violates the hypothesis |alpha| >= 1")]
    AlphaBelowOne(f64),

    #[error("right-hand side has a nonzero coefficient at {index:?}, outside the equation rows of a degree-{degree} solve")]
    NotBandLimited { index: (usize, usize), degree: usize },

    #[error("coefficient field mismatch: {0}")]
    FieldMismatch(&'static str),

    #[error("weight {weight} is incompatible with operator {family}")]
    IncompatibleWeight { family: String, weight: String },

    #[error("basepoint lies outside the domain")]
    BasepointOutside,

    #[error("weight is not strictly convex: second derivative {value} at x = {x}")]
    NotConvex { x: f64, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
