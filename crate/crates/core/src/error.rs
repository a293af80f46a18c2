use thiserror::Error;

/// Errors produced by the deconvolution pipeline and its diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sample grid: {0}")]
    InvalidGrid(String),

    #[error("max order {max_order} exceeds number of samples {n}")]
    OrderTooLarge { max_order: usize, n: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("scale mismatch: coefficients at a={coeffs}, operator requested at a={requested}")]
    ScaleMismatch { coeffs: f64, requested: f64 },

    #[error("singular lower-triangular operator: |b_0| = {0:e}")]
    Singular(f64),

    #[error("design matrix is rank deficient at order {order}")]
    RankDeficient { order: usize },

    #[error("no admissible model order for this grid and kernel")]
    DegenerateGrid,

    #[error("every scale in the a-grid failed: {0}")]
    AllScalesFailed(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("root set is not closed under conjugation (residual {0:e})")]
    NonConjugateRoots(f64),

    #[error("bandwidth {bandwidth} leaves only {count} points in the window around t={center}")]
    BandwidthTooSmall { bandwidth: f64, center: f64, count: usize },

    #[error("{path}: line {line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("grid mismatch at row {row}: {left} vs {right}")]
    GridMismatch { row: usize, left: f64, right: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
