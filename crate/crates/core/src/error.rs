use thiserror::Error;

/// Errors raised by the library.
///
/// Variants fall into three groups that the CLI maps onto exit statuses:
/// malformed input ([`Error::Parse`]), computations that cannot be carried
/// out at the available precision or depth, and detected invariant
/// violations ([`Error::InvariantViolation`]).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("value is rational: {0}")]
    NotIrrational(String),

    #[error("alpha is not in the open unit interval")]
    NotInUnitInterval,

    #[error("certified digit horizon exceeded: {0}")]
    HorizonExceeded(String),

    #[error("comparison undecidable at the working precision")]
    UndecidableAtHorizon,

    #[error("index {index} out of range (depth {depth})")]
    IndexOutOfRange { index: usize, depth: usize },

    #[error("convergent table too shallow: {0}")]
    DepthInsufficient(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid Ostrowski digits: {0}")]
    InvalidDigits(String),

    #[error("digit strings refer to different convergent tables")]
    TableMismatch,

    #[error("beta lies outside the fundamental window [-{{alpha}}, 1-{{alpha}})")]
    OutOfWindow,

    #[error("point lies on the orbit alpha*Z + Z at an expansion boundary")]
    OrbitPoint,

    #[error("precondition not met: {0}")]
    PreconditionUnmet(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("window is not a single special interval")]
    WindowNotSpecial,

    #[error("more than {bound} special intervals at level {level}")]
    MultiplicityExceeded { level: usize, bound: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
