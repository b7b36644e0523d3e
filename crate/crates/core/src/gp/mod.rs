//! Zero-mean Gaussian-process regression with a Matérn-5/2 ARD kernel.

mod hyper;
mod kernel;
mod model;

use thiserror::Error;

use crate::pso::PsoError;

pub use hyper::{fit_hyperparams, HyperFitOptions};
pub use kernel::{gram_matrix, matern52, KernelParams};
pub use model::{log_marginal_likelihood_of, GpModel, Posterior};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GpError {
    #[error("kernel parameters must be positive (noise variance non-negative) and finite")]
    InvalidParams,
    #[error("hyperparameter bounds must be positive, finite and increasing")]
    InvalidBounds,
    #[error("input dimension does not match the kernel or search space")]
    DimensionMismatch,
    #[error("{xs} inputs but {ys} targets")]
    LengthMismatch { xs: usize, ys: usize },
    #[error("no training data")]
    EmptyData,
    #[error("at least two observations are needed to fit kernel hyperparameters")]
    InsufficientData,
    #[error("training targets must be finite")]
    NonFiniteTarget,
    #[error("Gram matrix is not positive definite even with maximal jitter")]
    FactorizationFailure,
    #[error("hyperparameter search failed: {0}")]
    Fit(#[from] PsoError),
}
