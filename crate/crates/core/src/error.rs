use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(usize),
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: usize, right: usize },
    #[error("place {0} is zero mod p")]
    ZeroPlace(i64),
    #[error("p = 2 admits no nonzero places in {{1,...,(p-1)/2}}")]
    PlacesWithTwo,
    #[error("value {value} at index {index} lies outside [0, 1]")]
    RangeViolation { index: usize, value: f64 },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("expected length {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("spectrum is not conjugate symmetric (deviation {deviation:e})")]
    SymmetryViolation { deviation: f64 },
    #[error("index {index} out of range for p = {p}")]
    IndexOutOfRange { index: usize, p: usize },
    #[error("all columns have been deleted")]
    EmptyMatrix,
    #[error("minorant support leaves the sumset at {0}")]
    ContainmentViolation(usize),
    #[error("no strict separation: optimal margin {margin:e} does not exceed tolerance")]
    NoStrictSeparation { margin: f64 },
    #[error(
        "numerical ambiguity: hull residual {residual:e} above tol_hull and margin {margin:e} not above tol_sep"
    )]
    NumericalAmbiguity { residual: f64, margin: f64 },
    #[error("residual {residual:e} exceeds bound {bound:e} after reduction")]
    ResidualBlowup { residual: f64, bound: f64 },
    #[error("coefficient vectors share column {0}")]
    DisjointnessViolation(usize),
    #[error("p = {p} exceeds the guard {limit}")]
    TooLarge { p: usize, limit: usize },
    #[error("sign pattern violated at index {0}")]
    SignPatternViolation(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("linear program: {0}")]
    Lp(#[from] crate::simplex::LpError),
}
