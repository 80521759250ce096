use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("field mismatch: {left} vs {right}")]
    FieldMismatch { left: String, right: String },

    #[error("{0} is not prime")]
    NotPrime(String),

    #[error("precision exhausted: {0}")]
    Precision(String),

    #[error("singular: {0}")]
    Singular(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A limit does not exist: the entry at `position` carries the negative
    /// exponent (weight or valuation) `exponent`.
    #[error("no limit: entry {position:?} has exponent {exponent}")]
    NoLimit { position: Vec<usize>, exponent: BigInt },

    #[error("fit condition n >= (r+3)^2/4 fails for n = {n}, r = {r}")]
    FitCondition { n: usize, r: usize },

    #[error("placement failed: {0}")]
    Placement(String),

    #[error("witness verification failed: {0}")]
    WitnessVerification(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("set is not downward closed: {0:?} is missing")]
    NotDownwardClosed(Vec<usize>),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
