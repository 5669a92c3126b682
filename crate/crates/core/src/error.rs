use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("non-canonical element: {0}")]
    NonCanonical(String),

    #[error("operands live in different spaces: {0}")]
    SpaceMismatch(String),

    #[error("invalid operator parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An iterate left the floating-point range; `max_safe_k` powers were computed
    /// with finite coefficients.
    #[error("capacity exceeded at power {k}; largest safe power is {max_safe_k}")]
    Capacity { k: usize, max_safe_k: usize },

    #[error("iterated weight disagrees with the closed-form domain weight at power {k}")]
    DomainWeightMismatch { k: usize },

    /// No index in `[0, n_max]` starts a run of valid witnesses. `deltas` holds
    /// `(n, delta_n)` for diagnosis.
    #[error("no witness in range 0..={n_max}")]
    NoWitnessInRange { n_max: usize, deltas: Vec<(usize, f64)> },

    #[error("alpha must be nonzero")]
    InvalidAlpha,
}
