use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration violates its documented invariants.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The potential-kernel matrix of a set is singular, ill-conditioned or
    /// produces a negative harmonic measure.
    #[error("degenerate set {set}: {reason}")]
    Degenerate { set: String, reason: String },

    /// A requested table or domain exceeds the documented memory cap.
    #[error("resource cap exceeded: {0}")]
    Capacity(String),

    /// Rejection sampling produced too few accepted samples.
    #[error("insufficient samples: {accepted} accepted out of {total}; {hint}")]
    InsufficientSamples { accepted: u64, total: u64, hint: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
