use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("split would leave an empty partition (n = {n}, train = {train})")]
    Split { n: usize, train: usize },

    #[error("training set produced no triplets")]
    EmptyTriplets,

    #[error("non-finite value encountered at iteration {iteration}")]
    NumericalFailure { iteration: usize },
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
