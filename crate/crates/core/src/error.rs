use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("refused: {0}")]
    Refused(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("code generation failed for k={k}, m={m}, seed={seed}: generator stayed rank deficient after {redraws} redraws")]
    CodeGeneration {
        k: usize,
        m: usize,
        seed: u64,
        redraws: usize,
    },

    #[error("no codebook reached epsilon <= {target} after {attempts} attempts (best epsilon {best_epsilon}, base seed {seed})")]
    Infeasible {
        target: f64,
        best_epsilon: f64,
        attempts: usize,
        seed: u64,
    },

    #[error("certification mismatch: {0}")]
    CertificationMismatch(String),

    #[error("phase order violation: {0}")]
    PhaseOrder(String),

    #[error("malformed document: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::PhaseOrder(_) => 3,
            Error::CodeGeneration { .. } | Error::Infeasible { .. } | Error::CertificationMismatch(_) => 4,
            Error::Numerical(_) => 5,
            Error::DimensionMismatch { .. } => 6,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
