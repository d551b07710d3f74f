use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The cover iteration failed to reach `r_max >= 1` within its step cap.
    #[error("cover for R = {target} made no progress after {steps} steps")]
    Progress { target: String, steps: usize },

    /// A sampled bound exceeded the target ratio.
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
