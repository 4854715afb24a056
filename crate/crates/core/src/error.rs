use thiserror::Error;

use crate::group::GroupElement;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("out of window: {0}")]
    OutOfWindow(String),

    #[error("increment data does not encode an order window: cell {cell} repeats at index {index}")]
    InvalidIncrements { cell: GroupElement, index: i64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("enumeration budget exceeded: {atoms} atoms > {budget}")]
    Budget { atoms: f64, budget: f64 },

    #[error("consistency failure: {0}")]
    ConsistencyFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn window(msg: impl Into<String>) -> Self {
        Error::OutOfWindow(msg.into())
    }
}
