use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid sparse matrix: {0}")]
    InvalidMatrix(String),

    #[error("non-positive curvature detected at conjugate gradient iteration {iteration}")]
    NonPositiveCurvature { iteration: usize },

    #[error("exact transform is not twice differentiable (epsilon must be positive)")]
    NotTwiceDifferentiable,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("divergence; reduce omega (non-finite iterate at iteration {iteration})")]
    Divergence { iteration: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}
