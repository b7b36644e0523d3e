//! Benchmark harness: synthetic objectives, baseline optimizers, repeated
//! trials and MAX/MIN/AVE aggregation.

mod experiment;
mod functions;
mod local;
mod search;

use thiserror::Error;

use crate::boloop::BoError;
use crate::space::SpaceError;

pub use experiment::{
    aggregate, omega_sweep, run_experiment, run_method, Experiment, ExperimentReport, MethodReport,
    MethodSpec, SeedResult, SweepRow,
};
pub use functions::{
    branin, eval_objective, hartmann3, rastrigin, sphere, styblinski_tang, ObjectiveName, ObjectiveSpec,
};
pub use local::{local_ascent_maximize, run_local_bo, LocalAscentMaximizer, LocalAscentParams};
pub use search::{
    grid_axes, grid_points, grid_size, run_grid_search, run_random_search, DEFAULT_GRID_CAP,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("expected a {expected}-dimensional point, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid objective: {0}")]
    InvalidObjective(String),
    #[error("invalid method parameters: {0}")]
    InvalidMethodParams(String),
    #[error("grid of {size} points exceeds the cap of {cap}")]
    GridTooLarge { size: usize, cap: usize },
    #[error("omega = {omega} is outside the swarm stability region")]
    StabilityViolation { omega: f64 },
    #[error("methods used different evaluation budgets: {0}")]
    BudgetParityViolation(String),
    #[error("every run of {0} failed")]
    AllRunsFailed(String),
    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Bo(#[from] BoError),
}
