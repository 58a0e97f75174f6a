use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("precision must be at least one decimal digit, got {0}")]
    InvalidPrecision(u32),
    #[error("malformed decimal literal {0:?}")]
    Parse(String),
    #[error("invalid interval: need a < b, got [{a}, {b}]")]
    InvalidInterval { a: String, b: String },
    #[error("mesh width {h} does not divide [{a}, {b}] into an integer number of steps")]
    MeshNotDivisible { a: String, b: String, h: String },
    #[error("mesh width must satisfy 0 < h <= b - a, got {0}")]
    InvalidMeshWidth(String),
    #[error("no sign change of f on [{x1}, {x2}]")]
    NoSignChange { x1: String, x2: String },
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
