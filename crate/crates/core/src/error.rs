use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet mismatch: `{left}` vs `{right}`")]
    AlphabetMismatch { left: String, right: String },
    #[error("token `{0}` has no inverse")]
    MissingInverse(String),
    #[error("unknown token `{0}`")]
    UnknownToken(String),
    #[error("alphabet `{0}` has no matrix realization")]
    NoRealization(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("truncated code")]
    TruncatedCode,
    #[error("malformed code: {0}")]
    MalformedCode(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown estimator `{0}`")]
    UnknownEstimator(String),
    #[error("malformed program: {0}")]
    MalformedProgram(String),
    #[error("not a closed loop: endpoint gap {gap} exceeds tolerance {tolerance}")]
    NotALoop { gap: f64, tolerance: f64 },
    #[error("under-determined fit: {points} points for {unknowns} unknowns")]
    Underdetermined { points: usize, unknowns: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid harmonic (l = {l}, m = {m})")]
    InvalidHarmonic { l: usize, m: i64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
