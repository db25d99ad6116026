use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("algebra signature mismatch: {left:?} vs {right:?}")]
    SignatureMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("element is not Hermitian (block {block}, deviation {deviation:.3e})")]
    NotHermitian { block: usize, deviation: f64 },
    #[error("element is not positive (eigenvalue {eigenvalue:.3e})")]
    NotPositive { eigenvalue: f64 },
    #[error("element is singular (eigenvalue {eigenvalue:.3e} below tolerance)")]
    Singular { eigenvalue: f64 },
    #[error("matrix is not a projection")]
    NotProjection,
    #[error("projection has no well-defined module rank: {0}")]
    RankMismatch(String),
    #[error("block index {index} out of range for {blocks} blocks")]
    IndexOutOfRange { index: usize, blocks: usize },
    #[error("frame list is empty")]
    EmptyFrame,
    #[error("family is not a frame (lower bound {lower:.3e})")]
    NotFrame { lower: f64 },
    #[error("inner product <x_{index}, x_{index}> is not invertible")]
    SingularGram { index: usize },
    #[error("frame is not Parseval (eps {eps:.3e})")]
    NotParseval { eps: f64 },
    #[error("Naimark complement needs n > d")]
    NoComplement,
    #[error("vector {index} is not unit norm (norm {norm:.6})")]
    NotUnitNorm { index: usize, norm: f64 },
    #[error("step size {step} outside (0, 1/(2n)) = (0, {limit})")]
    StepSizeOutOfRange { step: f64, limit: f64 },
    #[error("marginal is singular: {0}")]
    SingularMarginal(String),
    #[error("iteration stalled at residual {residual:.3e}")]
    Degenerate { residual: f64 },
    #[error("operation requires a commutative signature")]
    NonCommutative,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
