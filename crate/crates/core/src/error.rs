use thiserror::Error;

/// Errors raised by the arithmetic, building and Min-set layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("no Conway polynomial shipped for p = {p}, m = {m}")]
    NoConwayPolynomial { p: u64, m: usize },
    #[error("precision N = {0} is too small (need N >= 4)")]
    PrecisionTooSmall(u32),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("incompatible tower: {0}")]
    IncompatibleTower(String),
    #[error("elements live in different field contexts")]
    ContextMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix entries are not integral")]
    NotIntegral,
    #[error("slope {0} is not integral")]
    SlopeNotIntegral(String),
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("multiplicity {mult} is not a multiple of the slope denominator {den}")]
    InvalidMultiplicity { mult: usize, den: i64 },
    #[error("isocline decomposition could not be verified: {0}")]
    DecompositionUnverified(String),
    #[error("exponent denominator {den} exceeds the cap {cap}")]
    DenominatorCapExceeded { den: i64, cap: i64 },
    #[error("norm is not in the Min-set of the Frobenius isometry")]
    NotInMin,
    #[error("slopes outside [0, 1]: no crystals exist")]
    SlopeRange,
    #[error("matrix does not commute with the Frobenius: g b != b sigma(g)")]
    NotInJ,
    #[error("sample count must be at least 1")]
    EmptySample,
    #[error("enumeration scale too large: {0}")]
    ScaleTooLarge(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn precision(what: impl Into<String>) -> Self {
        Error::PrecisionExhausted(what.into())
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NoConwayPolynomial { .. } => "NoConwayPolynomial",
            Error::PrecisionTooSmall(_) => "PrecisionTooSmall",
            Error::NotPrime(_) => "NotPrime",
            Error::InvalidField(_) => "InvalidField",
            Error::DivisionByZero => "DivisionByZero",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::IncompatibleTower(_) => "IncompatibleTower",
            Error::ContextMismatch => "ContextMismatch",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::Singular => "Singular",
            Error::NotIntegral => "NotIntegral",
            Error::SlopeNotIntegral(_) => "SlopeNotIntegral",
            Error::NotMonic => "NotMonic",
            Error::InvalidMultiplicity { .. } => "InvalidMultiplicity",
            Error::DecompositionUnverified(_) => "DecompositionUnverified",
            Error::DenominatorCapExceeded { .. } => "DenominatorCapExceeded",
            Error::NotInMin => "NotInMin",
            Error::SlopeRange => "SlopeRange",
            Error::NotInJ => "NotInJ",
            Error::EmptySample => "EmptySample",
            Error::ScaleTooLarge(_) => "ScaleTooLarge",
            Error::InvalidParams(_) => "InvalidParams",
            Error::UnknownSuite(_) => "UnknownSuite",
            Error::Parse(_) => "Parse",
        }
    }
}
