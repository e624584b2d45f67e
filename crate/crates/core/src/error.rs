use thiserror::Error;

/// Errors produced by the core operations.
#[derive(Error, Debug)]
pub enum Error {
    /// A point lies outside the domain of the map it was fed to.
    #[error("domain error: {0}")]
    Domain(String),

    /// An input violates a structural precondition (bad matrix, mismatched
    /// lengths, inadmissible word, out-of-range parameter).
    #[error("validation error: {0}")]
    Validation(String),

    /// An enumeration or DP table would exceed its size budget. Never
    /// silently truncated.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// The Chen-Stein gap scan has no admissible gap: requires m > tau + 1.
    #[error("empty gap range: tau(A) = {tau}, m = {m}; need m > tau + 1")]
    EmptyDeltaRange { tau: usize, m: u64 },

    /// Conditioning on a null set.
    #[error("conditional measure undefined: mu(A) = 0")]
    UndefinedConditional,

    /// A distribution whose mass does not sum to one was passed where a
    /// normalized one is required.
    #[error("distribution not normalized: total mass {0}")]
    Unnormalized(f64),

    /// A recurrence-time scan hit its cap without finding a return.
    #[error("recurrence time exceeded cap {0}")]
    RecurrenceOverflow(u64),
}

pub type Result<T> = std::result::Result<T, Error>;
