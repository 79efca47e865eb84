//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A run or schedule was configured inconsistently.
    #[error("configuration error: {0}")]
    Config(String),

    /// Vector lengths or declared dimensions disagree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The online loop hit a non-finite or infeasible state and stopped.
    #[error("run aborted at step {step}: {reason}")]
    Aborted { step: usize, reason: String },

    /// An analytic smoothed-gradient target is not known for this objective.
    #[error("no analytic smoothed gradient is known for this objective")]
    UnsupportedTarget,
}
