use crate::features::FeatureKey;

/// Errors produced by the core library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input bytes do not match the declared layout.
    #[error("malformed input: {0}")]
    MalformedInput(String),

    /// Plane or subband geometry does not satisfy an operation's requirements.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A declared configuration is inconsistent (specs, manifests, resample rules).
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument violates an operation's contract.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Frame index outside the opened sequence.
    #[error("frame index {index} out of range (frame count {count})")]
    OutOfRange { index: usize, count: usize },

    /// A computed feature value was NaN or infinite.
    #[error("feature `{0}` evaluated to a non-finite value")]
    NonFiniteFeature(FeatureKey),

    /// A prediction was requested for a key the model does not carry.
    #[error("feature `{0}` missing from input vector")]
    MissingFeature(FeatureKey),

    /// The SVR solver hit its iteration cap before reaching the tolerance.
    #[error("SVR training did not converge within {cap} iterations")]
    Training { cap: usize },

    /// A serialized model declares an unsupported schema version.
    #[error("model schema version {found} not supported (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("model file: {0}")]
    ModelFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
