use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ring shape mismatch: (n={left_n}, q={left_q}) vs (n={right_n}, q={right_q})")]
    ShapeMismatch {
        left_n: usize,
        left_q: u32,
        right_n: usize,
        right_q: u32,
    },

    #[error("vector length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown profile `{0}`")]
    UnknownProfile(String),

    #[error("challenge space has {bits:.2} bits of entropy, below the required {required}")]
    InsufficientChallengeEntropy { bits: f64, required: u32 },

    #[error("tag is not invertible in R_q")]
    NonInvertibleTag,

    #[error("gadget decoding failed: residue outside the tolerated band")]
    DecodeFailure,

    #[error("trapdoor inversion failed: recovered error is not short")]
    InversionFailure,

    #[error("perturbation covariance is not positive definite: {0}")]
    CovarianceNotPositiveDefinite(String),

    #[error("signing gave up after {0} attempts")]
    SigningAttemptsExceeded(usize),

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("unsupported format version {found} (expected {expected})")]
    UnsupportedVersion { found: u8, expected: u8 },

    #[error("encoded length mismatch: expected {expected} bytes, got {actual}")]
    EncodedLengthMismatch { expected: usize, actual: usize },

    #[error("coefficient out of range: {0}")]
    CoefficientOutOfRange(String),

    #[error("parameter fingerprint mismatch")]
    ParamsMismatch,

    #[error("invalid seed: {0}")]
    InvalidSeed(String),

    #[error("os entropy unavailable: {0}")]
    Entropy(String),
}
