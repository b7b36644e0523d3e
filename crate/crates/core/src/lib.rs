//! Bayesian optimization with a particle swarm as the acquisition maximizer.
//!
//! The crate is organized bottom-up:
//!
//! * [`space`]: bounded mixed real/integer domains.
//! * [`pso`]: the swarm maximizer, used both for acquisition maximization and
//!   for fitting kernel hyperparameters.
//! * [`gp`]: zero-mean Gaussian-process regression with a Matérn-5/2 kernel.
//! * [`acquisition`]: UCB, EI and PI over GP posteriors.
//! * [`boloop`]: the sequential optimization loop.
//! * [`bench`]: synthetic objectives, baselines and the repeated-trial harness.
//! * [`io`]: readers and writers for the emitted artifacts.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases below fix it to `f64`, which is what the benchmark harness uses.

pub mod acquisition;
pub mod bench;
pub mod boloop;
pub mod gp;
pub mod io;
pub mod linalg;
pub mod pso;
pub mod rng;
mod scalar;
pub mod space;

pub use scalar::Scalar;

pub type SearchSpace64 = space::SearchSpace<f64>;
pub type SearchSpace32 = space::SearchSpace<f32>;
pub type DimensionSpec64 = space::DimensionSpec<f64>;
pub type PsoParams64 = pso::PsoParams<f64>;
pub type PsoParams32 = pso::PsoParams<f32>;
pub type KernelParams64 = gp::KernelParams<f64>;
pub type GpModel64 = gp::GpModel<f64>;
pub type GpModel32 = gp::GpModel<f32>;
pub type AcquisitionSpec64 = acquisition::AcquisitionSpec<f64>;
pub type BoConfig64 = boloop::BoConfig<f64>;
pub type BoResult64 = boloop::BoResult<f64>;
