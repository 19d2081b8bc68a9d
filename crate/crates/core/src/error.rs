use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime modulus (need a prime p < 2^61)")]
    NotPrime(u64),

    #[error("attempted to invert zero")]
    ZeroInverse,

    #[error("grid radius {radius} must satisfy 1 <= R < p = {p}")]
    RadiusExceedsField { radius: u64, p: u64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operands live over different fields (p = {0} vs p = {1})")]
    FieldMismatch(u64, u64),

    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,

    #[error("degree {degree} exceeds the allowed maximum {max}")]
    DegreeTooLarge { degree: u32, max: u64 },

    #[error("family is not linear")]
    NotLinearFamily,

    #[error("resource cap exceeded: {needed} units requested, cap is {cap}")]
    ResourceCapExceeded { needed: u128, cap: u64 },

    #[error("no correct test sequence exists inside the candidate pool")]
    NoCtsInPool,

    #[error("field too small: p = {p} must exceed the sampling radius R = {radius}")]
    FieldTooSmall { p: u64, radius: u64 },

    #[error("characteristic 2 is not supported by this construction")]
    BadCharacteristic,

    #[error("missing declaration: {0}")]
    MissingDeclaration(&'static str),

    #[error("grid coordinate {coordinate} contains the repeated node {value}")]
    DuplicateNode { coordinate: usize, value: u64 },

    #[error("exponent {0:?} is outside the exponent box")]
    ThetaOutOfBox(Vec<u32>),

    #[error("declared degree {declared} does not match |theta| = {theta}")]
    DegreeMismatch { declared: u32, theta: u32 },

    #[error("degrees must be sorted in non-increasing order")]
    UnsortedDegrees,

    #[error("hypothesis not met: {0}")]
    HypothesisUnmet(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::ResourceCapExceeded { .. })
    }
}
