use thiserror::Error;

/// Errors raised by mesh handling, element construction and the solver.
#[derive(Debug, Error)]
pub enum VemError {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("connectivity error: {0}")]
    Connectivity(String),

    #[error("degenerate {kind} {id}: {detail}")]
    Degenerate {
        kind: &'static str,
        id: usize,
        detail: String,
    },

    #[error("cell {cell} is not star-shaped with respect to its centroid")]
    NotCentroidStar { cell: usize },

    #[error("unsupported mesh kind {kind} at resolution {resolution}: {detail}")]
    UnsupportedKind {
        kind: String,
        resolution: usize,
        detail: String,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unisolvence violation on cell {cell}: {detail}")]
    Unisolvence { cell: usize, detail: String },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("numerical failure on cell {cell}: {detail}")]
    Element { cell: usize, detail: String },

    #[error("matrix is not positive definite: {0}")]
    Indefinite(String),

    #[error("conjugate gradients did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
}

impl VemError {
    /// True for errors caused by bad user input rather than a numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            VemError::InvalidMesh(_)
                | VemError::Connectivity(_)
                | VemError::UnsupportedKind { .. }
                | VemError::InvalidInput(_)
                | VemError::Io(_)
                | VemError::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, VemError>;
