use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidSpec(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("accuracy error: {0}")]
    Accuracy(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("no convergence after {iterations} iterations (last residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("point outside domain: {0}")]
    Domain(String),
    #[error("evaluation failed: {0}")]
    Evaluation(String),
    #[error("linear program failed: {0}")]
    Solver(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
