//! Error types shared across the solver and analysis modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported degree k={0}")]
    UnsupportedDegree(usize),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("tableau validation failed: {0}")]
    TableauValidation(String),

    #[error("non-physical state ({context}): rho={rho}, p={p}")]
    State { context: String, rho: f64, p: f64 },

    #[error("blow-up detected at t={t}: {detail}")]
    BlowUp { t: f64, detail: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown name '{name}'; valid: {valid}")]
    Lookup { name: String, valid: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SolverError>;

impl SolverError {
    /// Process exit code per the CLI contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            SolverError::BlowUp { .. } => 3,
            SolverError::Config(_)
            | SolverError::InvalidArgument(_)
            | SolverError::UnsupportedDegree(_)
            | SolverError::TableauValidation(_)
            | SolverError::Lookup { .. } => 2,
            _ => 4,
        }
    }
}
