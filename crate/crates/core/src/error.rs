use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),

    #[error("polytope is not Delzant at vertex {vertex:?}: {reason}")]
    NotDelzant { vertex: Vec<f64>, reason: String },

    #[error("Hessian of the symplectic potential is not positive definite at x = {node:?}")]
    HessianNotPositive { node: Vec<f64> },

    #[error("Fubini-Study form lost positivity at x = {node:?} (det = {det:e})")]
    FsNotPositive { node: Vec<f64>, det: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),

    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("no admissible trace constant: {0}")]
    NoAdmissibleConstant(String),

    #[error("line search failed at iteration {iteration} (residual {residual:e})")]
    LineSearch { iteration: usize, residual: f64 },

    #[error("expansion is not polynomial: residual {0}")]
    NotPolynomial(String),

    #[error("degenerate action: {0}")]
    Degenerate(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("negative certificate weight b = {0:e}")]
    NegativeWeight(f64),

    #[error("report not converged: {0}")]
    NotConverged(String),

    #[error("normalisation mismatch: {0}")]
    Normalisation(String),
}
