use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid parameters, options or mismatched inputs.
    #[error("configuration error: {0}")]
    Config(String),

    /// Integration left the admissible state box.
    #[error("numerical divergence at step {step}: {detail}")]
    Divergence { step: usize, detail: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unknown identifier: {0}")]
    UnknownId(String),

    #[error("duplicate identifier: {0}")]
    DuplicateId(String),

    #[error("measurement error: {0}")]
    Measurement(String),

    /// Fock-space truncation dropped more weight than tolerated.
    #[error("cutoff overflow: {0}")]
    CutoffOverflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
