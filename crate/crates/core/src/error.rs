use thiserror::Error;

/// Errors raised by the reconstruction toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid state descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The wavefunction does not decay inside the grid.
    #[error("support overflow: edge amplitude {edge:.3e} exceeds {limit:.3e} ({context})")]
    SupportOverflow {
        edge: f64,
        limit: f64,
        context: &'static str,
    },

    #[error("operands do not share a grid and representation")]
    Mismatch,

    #[error(
        "bin [{lo}, {hi}) carries probability {probability:.3e}, below the postselection threshold"
    )]
    EmptyBin { lo: f64, hi: f64, probability: f64 },

    #[error("nothing to reconstruct: modulus vanishes everywhere")]
    NothingToReconstruct,

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
