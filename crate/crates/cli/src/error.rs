use qel_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("manifests are not comparable: {0}")]
    Mismatch(String),

    #[error("not converged: {0}")]
    NotConverged(String),
}

impl CliError {
    /// 0 success, 1 numerical non-convergence, 2 config error, 3 internal invariant violation.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Mismatch(_) => 2,
            CliError::NotConverged(_) => 1,
            CliError::Core(e) => core_exit_code(e),
            CliError::Io(_) | CliError::Json(_) => 3,
        }
    }
}

pub fn core_exit_code(e: &CoreError) -> u8 {
    match e {
        CoreError::NotConverged(_) | CoreError::LineSearch { .. } => 1,
        CoreError::InvalidPolytope(_)
        | CoreError::NotDelzant { .. }
        | CoreError::HessianNotPositive { .. }
        | CoreError::Dimension { .. }
        | CoreError::Unsupported(_) => 2,
        _ => 3,
    }
}
