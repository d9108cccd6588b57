use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("loss sequence is empty")]
    EmptySequence,

    #[error("proposal density is zero at the input point; it cannot be a draw from Q")]
    ZeroDensity,

    #[error("rejection loop exceeded {cap} iterations; density oracles are inconsistent")]
    SamplerIterationCap { cap: u64 },

    #[error("only equal-variance Gaussians are supported (got std {a} and {b})")]
    UnequalStd { a: f64, b: f64 },

    #[error("probability vector is not normalized (sum = {sum})")]
    NotNormalized { sum: f64 },

    #[error("objective is not strongly convex (modulus {modulus})")]
    NotStronglyConvex { modulus: f64 },

    #[error("solver did not converge after {iterations} iterations (gradient mapping norm {residual:e})")]
    SolverDidNotConverge { iterations: usize, residual: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("replay sequence exhausted at round {round}")]
    ReplayExhausted { round: usize },

    #[error("adaptive adversary requires the player's decision for round {round}")]
    MissingDecision { round: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}
