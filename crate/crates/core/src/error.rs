use thiserror::Error;

/// Errors raised by the exact-arithmetic engine and the identity registry.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot parse `{0}` as an exact rational")]
    ParseScalar(String),

    #[error("series has a nonzero constant term; composition needs g(0) = 0")]
    NonZeroConstantTerm,

    #[error("divisor series must have valuation exactly 1")]
    DivisorValuation,

    #[error("series valuation {valuation} is below the requested power {power}")]
    ValuationTooLow { valuation: usize, power: usize },

    #[error("series constant term must be 1 to invert, found {0}")]
    NotUnitConstant(String),

    #[error("multivariate series limit exceeded: {0}")]
    MultiSeriesLimit(String),

    #[error("index vector must have at least one entry")]
    EmptyIndexVector,

    #[error("index vector must not be all zero")]
    AllZeroIndexVector,

    #[error("index vector {0} has a positive entry; this route needs nonpositive indices")]
    PositiveIndex(String),

    #[error("position {position} is outside 1..={len}")]
    PositionOutOfRange { position: u32, len: u32 },

    #[error("argument `{name}` must be at least {min}, got {got}")]
    ArgumentTooSmall {
        name: &'static str,
        min: i64,
        got: i64,
    },

    #[error("expected an integer result, got {0}")]
    NotIntegral(String),

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("range for {identity}: `{field}` must be at least {min}, got {got}")]
    RangeBelowMinimum {
        identity: String,
        field: &'static str,
        min: u32,
        got: u32,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
