//! The sequential optimization loop.
//!
//! A run evaluates `init_count` uniform points, then repeats `iterations`
//! times: refit the GP (kernel hyperparameters included), maximize the
//! acquisition function over the surrogate, evaluate the objective at the
//! materialized maximizer and append the observation.
//!
//! Every random stream is derived from the root seed and a tag (`init`,
//! `gpfit:t`, `acq:t`, `fallback:t`), so a run is reproducible from its
//! configuration alone.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acquisition::AcquisitionSpec;
use crate::gp::{fit_hyperparams, GpError, GpModel, HyperFitOptions, KernelParams};
use crate::pso::{run_pso, PsoError, PsoParams};
use crate::rng::{stream, SeedRng};
use crate::space::{Point, SearchSpace, SpaceError};
use crate::Scalar;

/// Failure reported by an objective function.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct ObjectiveError(pub String);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Gp(#[from] GpError),
    #[error(transparent)]
    Pso(#[from] PsoError),
    #[error("objective failed at evaluation {index}: {source}")]
    ObjectiveFailure { index: usize, source: ObjectiveError },
    #[error("history is empty")]
    EmptyHistory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Init,
    Bo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record<T> {
    /// Point proposed in the continuous representation.
    pub point: Point<T>,
    /// Point the objective actually saw.
    pub materialized: Point<T>,
    pub y: T,
    pub iteration: usize,
    pub phase: Phase,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ObservationHistory<T> {
    pub records: Vec<Record<T>>,
}

impl<T: Scalar> ObservationHistory<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Index of the best observation; the earliest one wins ties.
    pub fn best_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, r) in self.records.iter().enumerate() {
            if best.is_none_or(|b| r.y > self.records[b].y) {
                best = Some(i);
            }
        }
        best
    }

    pub fn best(&self) -> Option<&Record<T>> {
        self.best_index().map(|i| &self.records[i])
    }

    /// Best-so-far value after each observation.
    pub fn incumbent_trace(&self) -> Vec<T> {
        let mut best = T::neg_infinity();
        self.records
            .iter()
            .map(|r| {
                best = best.max(r.y);
                best
            })
            .collect()
    }

    pub fn bo_steps(&self) -> usize {
        self.records.iter().filter(|r| r.phase == Phase::Bo).count()
    }

    fn push(&mut self, point: Point<T>, materialized: Point<T>, y: T, phase: Phase) {
        let iteration = self.records.len();
        self.records.push(Record { point, materialized, y, iteration, phase });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoConfig<T> {
    pub space: SearchSpace<T>,
    pub acquisition: AcquisitionSpec<T>,
    /// Swarm used to maximize the acquisition function.
    pub pso: PsoParams<T>,
    /// Kernel fitting; `gp.noise_var` pins the noise variance when known.
    pub gp: HyperFitOptions<T>,
    pub init_count: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl<T: Scalar> BoConfig<T> {
    /// Default settings: UCB with γ = 2, the default swarm, 5 initial points.
    pub fn new(space: SearchSpace<T>, iterations: usize, seed: u64) -> Self {
        Self {
            space,
            acquisition: AcquisitionSpec::default(),
            pso: PsoParams::default(),
            gp: HyperFitOptions::default(),
            init_count: 5,
            iterations,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), BoError> {
        if self.init_count < 1 {
            return Err(BoError::InvalidConfig("init_count must be at least 1".into()));
        }
        if self.iterations < 1 {
            return Err(BoError::InvalidConfig("iterations must be at least 1".into()));
        }
        self.acquisition.validate().map_err(BoError::InvalidConfig)?;
        self.pso.validate()?;
        self.gp.validate()?;
        Ok(())
    }

    /// Objective evaluations a full run performs.
    pub fn budget(&self) -> usize {
        self.init_count + self.iterations
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoResult<T> {
    /// Materialized best point.
    pub best_point: Point<T>,
    pub best_value: T,
    pub history: ObservationHistory<T>,
    pub incumbent_trace: Vec<T>,
    pub evaluations: usize,
}

impl<T: Scalar> BoResult<T> {
    pub fn from_history(history: ObservationHistory<T>) -> Result<Self, BoError> {
        let best = history.best().ok_or(BoError::EmptyHistory)?;
        Ok(Self {
            best_point: best.materialized.clone(),
            best_value: best.y,
            incumbent_trace: history.incumbent_trace(),
            evaluations: history.len(),
            history,
        })
    }
}

/// Strategy for maximizing an acquisition surface over the search space.
pub trait AcquisitionMaximizer<T: Scalar>: Sync {
    fn maximize(
        &self,
        space: &SearchSpace<T>,
        acquisition: &(dyn Fn(&[T]) -> T + Sync),
        rng: &mut SeedRng,
    ) -> Result<Point<T>, BoError>;
}

/// Acquisition maximization with the particle swarm.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmMaximizer<T>(pub PsoParams<T>);

impl<T: Scalar> AcquisitionMaximizer<T> for SwarmMaximizer<T> {
    fn maximize(
        &self,
        space: &SearchSpace<T>,
        acquisition: &(dyn Fn(&[T]) -> T + Sync),
        rng: &mut SeedRng,
    ) -> Result<Point<T>, BoError> {
        Ok(run_pso(space, &self.0, &acquisition, rng)?.best_position)
    }
}

fn observe<T, O>(
    history: &mut ObservationHistory<T>,
    space: &SearchSpace<T>,
    point: Point<T>,
    phase: Phase,
    objective: &mut O,
) -> Result<T, BoError>
where
    T: Scalar,
    O: FnMut(&[T]) -> Result<T, ObjectiveError>,
{
    let index = history.len();
    let materialized = space.materialize(&point)?;
    let y = objective(&materialized).map_err(|source| BoError::ObjectiveFailure { index, source })?;
    if y.is_nan() {
        return Err(BoError::ObjectiveFailure { index, source: ObjectiveError("objective returned NaN".into()) });
    }
    history.push(point, materialized, y, phase);
    Ok(y)
}

/// Evaluates `init_count` uniform random points.
pub fn init_design<T, O, R>(
    config: &BoConfig<T>,
    objective: &mut O,
    rng: &mut R,
) -> Result<ObservationHistory<T>, BoError>
where
    T: Scalar,
    O: FnMut(&[T]) -> Result<T, ObjectiveError>,
    R: Rng + ?Sized,
{
    config.validate()?;
    let mut history = ObservationHistory::default();
    for _ in 0..config.init_count {
        let x = config.space.sample_uniform(rng);
        observe(&mut history, &config.space, x, Phase::Init, objective)?;
    }
    Ok(history)
}

/// Fits the surrogate to the current history: kernel hyperparameters first
/// (skipped with a single observation), then the model itself.
pub fn fit_surrogate<T: Scalar>(
    history: &ObservationHistory<T>,
    config: &BoConfig<T>,
    rng: &mut SeedRng,
) -> Result<GpModel<T>, GpError> {
    let xs: Vec<Point<T>> = history.records.iter().map(|r| r.materialized.clone()).collect();
    let ys: Vec<T> = history.records.iter().map(|r| r.y).collect();
    let params = if xs.len() >= 2 {
        fit_hyperparams(&config.space, &xs, &ys, &config.gp, rng)?
    } else {
        let mut p = KernelParams::fallback(config.space.len());
        if let Some(n) = config.gp.noise_var {
            p.noise_var = n;
        }
        p
    };
    GpModel::fit(&config.space, &xs, &ys, params)
}

/// Proposes the next point for `history` using `maximizer`.
pub fn propose<T: Scalar>(
    history: &ObservationHistory<T>,
    config: &BoConfig<T>,
    maximizer: &dyn AcquisitionMaximizer<T>,
) -> Result<Point<T>, BoError> {
    if history.is_empty() {
        return Err(BoError::EmptyHistory);
    }
    let t = history.bo_steps() + 1;
    let model = match fit_surrogate(history, config, &mut stream(config.seed, &format!("gpfit:{t}"))) {
        Ok(m) => m,
        Err(GpError::FactorizationFailure) => {
            log::warn!("step {t}: surrogate could not be factored; proposing a uniform random point");
            let mut rng = stream(config.seed, &format!("fallback:{t}"));
            return Ok(config.space.sample_uniform(&mut rng));
        }
        Err(e) => return Err(e.into()),
    };
    let mut spec = config.acquisition.clone();
    spec.incumbent = history.best().map(|r| r.y).ok_or(BoError::EmptyHistory)?;
    let acquisition = |x: &[T]| match model.predict(x) {
        Ok(post) => spec.score(&post),
        Err(_) => T::nan(),
    };
    maximizer.maximize(&config.space, &acquisition, &mut stream(config.seed, &format!("acq:{t}")))
}

/// One iteration with an explicit acquisition maximizer. Returns the chosen
/// continuous point and the observed value.
pub fn bo_step_with<T, O>(
    history: &mut ObservationHistory<T>,
    config: &BoConfig<T>,
    objective: &mut O,
    maximizer: &dyn AcquisitionMaximizer<T>,
) -> Result<(Point<T>, T), BoError>
where
    T: Scalar,
    O: FnMut(&[T]) -> Result<T, ObjectiveError>,
{
    let x = propose(history, config, maximizer)?;
    let y = observe(history, &config.space, x.clone(), Phase::Bo, objective)?;
    Ok((x, y))
}

/// One iteration with the swarm maximizer configured in `config.pso`.
pub fn bo_step<T, O>(
    history: &mut ObservationHistory<T>,
    config: &BoConfig<T>,
    objective: &mut O,
) -> Result<(Point<T>, T), BoError>
where
    T: Scalar,
    O: FnMut(&[T]) -> Result<T, ObjectiveError>,
{
    bo_step_with(history, config, objective, &SwarmMaximizer(config.pso.clone()))
}

/// Full run with an explicit acquisition maximizer.
pub fn run_bo_with<T, O>(
    config: &BoConfig<T>,
    objective: &mut O,
    maximizer: &dyn AcquisitionMaximizer<T>,
) -> Result<BoResult<T>, BoError>
where
    T: Scalar,
    O: FnMut(&[T]) -> Result<T, ObjectiveError>,
{
    let mut history = init_design(config, objective, &mut stream(config.seed, "init"))?;
    for _ in 0..config.iterations {
        bo_step_with(&mut history, config, objective, maximizer)?;
    }
    BoResult::from_history(history)
}

/// Full run with the swarm as acquisition maximizer.
pub fn run_bo<T, O>(config: &BoConfig<T>, objective: &mut O) -> Result<BoResult<T>, BoError>
where
    T: Scalar,
    O: FnMut(&[T]) -> Result<T, ObjectiveError>,
{
    run_bo_with(config, objective, &SwarmMaximizer(config.pso.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::space::DimensionSpec;

    fn config_1d(iterations: usize, seed: u64) -> BoConfig<f64> {
        BoConfig::new(SearchSpace::uniform(1, 0.0, 1.0).unwrap(), iterations, seed)
    }

    #[test]
    fn init_design_counts_and_phases() {
        let cfg = config_1d(1, 3);
        let mut f = |_: &[f64]| Ok(0.0);
        let h = init_design(&cfg, &mut f, &mut seeded(1)).unwrap();
        assert_eq!(h.len(), 5);
        assert!(h.records.iter().all(|r| r.phase == Phase::Init && r.y == 0.0));
        let h2 = init_design(&cfg, &mut f, &mut seeded(1)).unwrap();
        assert_eq!(h, h2);
    }

    #[test]
    fn objective_failure_carries_index() {
        let cfg = config_1d(1, 3);
        let mut calls = 0;
        let mut f = |_: &[f64]| {
            calls += 1;
            if calls == 3 { Err(ObjectiveError("boom".into())) } else { Ok(1.0) }
        };
        let err = init_design(&cfg, &mut f, &mut seeded(1)).unwrap_err();
        assert_eq!(err, BoError::ObjectiveFailure { index: 2, source: ObjectiveError("boom".into()) });
    }

    #[test]
    fn minimal_run_has_two_records() {
        let mut cfg = config_1d(1, 8);
        cfg.init_count = 1;
        let mut f = |x: &[f64]| Ok(-(x[0] - 0.5).powi(2));
        let res = run_bo(&cfg, &mut f).unwrap();
        assert_eq!(res.history.len(), 2);
        assert_eq!(res.evaluations, 2);
        assert_eq!(res.history.records[1].phase, Phase::Bo);
    }

    #[test]
    fn step_grows_history_by_one_even_for_duplicates() {
        let cfg = config_1d(3, 2);
        // A flat objective drives repeated proposals.
        let mut f = |_: &[f64]| Ok(1.0);
        let mut h = init_design(&cfg, &mut f, &mut seeded(2)).unwrap();
        let dup = h.records[0].point.clone();
        h.push(dup.clone(), dup, 1.0, Phase::Bo);
        let before = h.len();
        bo_step(&mut h, &cfg, &mut f).unwrap();
        assert_eq!(h.len(), before + 1);
    }

    #[test]
    fn integer_dims_are_materialized() {
        let space = SearchSpace::new(vec![
            DimensionSpec::real("lr", 0.1, 1.0),
            DimensionSpec::integer("n", 10.0, 250.0),
        ])
        .unwrap();
        let mut cfg = BoConfig::new(space.clone(), 4, 5);
        cfg.pso.max_iters = 30;
        cfg.gp.pso.max_iters = 30;
        let mut f = |x: &[f64]| Ok(-(x[0] - 0.4).powi(2) - ((x[1] - 120.0) / 100.0).powi(2));
        let res = run_bo(&cfg, &mut f).unwrap();
        for r in &res.history.records {
            assert!(space.contains_materialized(&r.materialized));
        }
        assert!(space.contains_materialized(&res.best_point));
        assert_eq!(res.best_value, *res.incumbent_trace.last().unwrap());
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = config_1d(1, 1);
        cfg.init_count = 0;
        let mut f = |_: &[f64]| Ok(0.0);
        assert!(matches!(run_bo(&cfg, &mut f), Err(BoError::InvalidConfig(_))));
        let mut cfg = config_1d(1, 1);
        cfg.iterations = 0;
        assert!(matches!(run_bo(&cfg, &mut f), Err(BoError::InvalidConfig(_))));
        let mut cfg = config_1d(1, 1);
        cfg.pso.omega = 1.0;
        assert!(matches!(run_bo(&cfg, &mut f), Err(BoError::Pso(PsoError::OmegaOutOfRange(_)))));
    }
}
