use thiserror::Error;

pub type Result<T, E = EfsError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum EfsError {
    #[error("embedding row {0} has zero norm")]
    ZeroNormEmbedding(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value in {field} at index {index}")]
    NonFiniteValue { field: &'static str, index: usize },
    #[error("signal set must contain at least one frame")]
    EmptySignals,
    #[error("invalid frame rate {0}")]
    InvalidFps(f64),
    #[error("similarity window must be at least 1, got {0}")]
    WindowTooSmall(usize),
    #[error("boundary {boundary} outside the open range (0, {n_minus_one})")]
    BoundaryOutOfRange { boundary: usize, n_minus_one: usize },
    #[error("segment [{start}, {end}) has a zero mean embedding")]
    ZeroMeanSegment { start: usize, end: usize },
    #[error("anchor set is empty")]
    EmptyAnchorSet,
    #[error("frame budget must be at least 1")]
    BudgetZero,
    #[error("frame index {index} out of range for {n} frames")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("bad magic {0:?}, expected \"EFSS\"")]
    BadMagic([u8; 4]),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("truncated payload: need {expected} bytes, found {actual}")]
    TruncatedPayload { expected: usize, actual: usize },
    #[error("payload has {0} trailing bytes after declared content")]
    TrailingBytes(usize),
    #[error("invalid metadata: {0}")]
    InvalidMetadata(String),
    #[error("missing ground truth: {0}")]
    MissingGroundTruth(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl EfsError {
    /// Stable machine-readable identifier, used in CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            EfsError::ZeroNormEmbedding(_) => "ZeroNormEmbedding",
            EfsError::DimensionMismatch(_) => "DimensionMismatch",
            EfsError::NonFiniteValue { .. } => "NonFiniteValue",
            EfsError::EmptySignals => "EmptySignals",
            EfsError::InvalidFps(_) => "InvalidFps",
            EfsError::WindowTooSmall(_) => "WindowTooSmall",
            EfsError::BoundaryOutOfRange { .. } => "BoundaryOutOfRange",
            EfsError::ZeroMeanSegment { .. } => "ZeroMeanSegment",
            EfsError::EmptyAnchorSet => "EmptyAnchorSet",
            EfsError::BudgetZero => "BudgetZero",
            EfsError::IndexOutOfRange { .. } => "IndexOutOfRange",
            EfsError::InvalidConfig(_) => "InvalidConfig",
            EfsError::InvalidSpec(_) => "InvalidSpec",
            EfsError::BadMagic(_) => "BadMagic",
            EfsError::UnsupportedVersion(_) => "UnsupportedVersion",
            EfsError::TruncatedPayload { .. } => "TruncatedPayload",
            EfsError::TrailingBytes(_) => "TrailingBytes",
            EfsError::InvalidMetadata(_) => "InvalidMetadata",
            EfsError::MissingGroundTruth(_) => "MissingGroundTruth",
            EfsError::Io(_) => "Io",
        }
    }
}
