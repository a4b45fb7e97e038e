use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix data has {actual} entries, expected {expected}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian")]
    NotHermitian,

    #[error("eigensolver failed to converge")]
    NoConvergence,

    #[error("wrong ensemble kind: expected {expected}, got {actual}")]
    WrongEnsemble {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("no perfect matching exists: {half_edges} half-edges is odd")]
    NoPerfectMatching { half_edges: usize },

    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("invalid subgraph: {0}")]
    InvalidSubgraph(String),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("a zero of det(I - zM) lies {distance:e} from the circle of radius {radius}")]
    ZeroNearCircle { radius: f64, distance: f64 },

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics themselves rather than of the inputs.
    pub fn is_numeric_failure(&self) -> bool {
        matches!(self, Error::NoConvergence)
    }
}
