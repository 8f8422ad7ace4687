use thiserror::Error;

/// Errors for ring construction, geometry, search and code analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree {r} out of supported range 1..={max}")]
    UnsupportedDegree { r: usize, max: usize },
    #[error("invalid modulus polynomial: {0}")]
    InvalidModulus(String),
    #[error("ring order {order} exceeds enumeration cap {cap}")]
    RingTooLarge { order: u64, cap: u64 },
    #[error("element is not a unit")]
    NonUnit,
    #[error("vector has no unit coordinate")]
    NotUnimodular,
    #[error("matrix determinant is not a unit")]
    SingularMatrix,
    #[error("group produced {points} point orbits but {lines} line orbits")]
    OrbitCountMismatch { points: usize, lines: usize },
    #[error("Singer lift construction failed: {0}")]
    SingerConstruction(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("enumeration budget exceeded: {0}")]
    EnumerationBudget(String),
    #[error("Gray map is only defined for chain length m <= 2, got m = {m}")]
    UnsupportedGray { m: u32 },
    #[error("malformed certificate: {0}")]
    Certificate(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
