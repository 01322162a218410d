use thiserror::Error;

/// Errors raised by counting, estimation and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined
    /// or where the underlying bound is valid.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested computation exceeds a configured memory or time budget.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A numerical routine stopped before reaching its tolerance. The best
    /// estimate and the error actually achieved are carried along.
    #[error("tolerance not reached: estimate {estimate:e}, achieved error {achieved:e}")]
    Accuracy { estimate: f64, achieved: f64 },

    /// Parameters violate a structural invariant (e.g. `C <= B`).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// An operation precondition does not hold (e.g. a Sturm endpoint is a root).
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
