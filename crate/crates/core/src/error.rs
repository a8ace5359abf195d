use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("quadrature order {got} is below the minimum {min} required for index order {order}")]
    QuadratureOrder { got: usize, min: usize, order: usize },

    #[error("estimated allocation of {needed} bytes exceeds the memory cap of {cap} bytes")]
    Resource { needed: u64, cap: u64 },

    #[error("indices outside truncation: {0}")]
    OutOfTruncation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "time grid has M = {got} samples but exact q = 2 time integration requires M >= 2*ell_max + 1 = {required}"
    )]
    TimeExactness { got: usize, required: usize },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
