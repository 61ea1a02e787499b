use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid vector: {0}")]
    InvalidVector(String),

    #[error("point is not on the upper sheet: {0}")]
    OffSheet(String),

    #[error("matrix is not a valid isometry: {0}")]
    NotIsometry(String),

    #[error("invalid ideal point: {0}")]
    InvalidIdealPoint(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("word exceeds maximum length {max}")]
    WordTooLong { max: usize },

    #[error("cannot parse word: {0}")]
    WordParse(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("not Lorentz-realizable at this tolerance: {positive} positive eigenvalues")]
    NotRealizable { positive: usize },

    #[error("degenerate span: {0}")]
    DegenerateSpan(String),

    #[error("isometry extension failed: residual {residual:.3e} exceeds {tolerance:.1e}")]
    ExtensionResidual { residual: f64, tolerance: f64 },

    #[error("tree map leaves the embedded vertex set at {0}")]
    OutsideEmbedding(String),

    #[error("ping-pong certificate fails: half-spaces {first} and {second} overlap (B = {product:.6})")]
    PingPong {
        first: String,
        second: String,
        product: f64,
    },

    #[error("construction check failed: {0}")]
    Construction(String),

    #[error("cannot render: {0}")]
    Render(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
