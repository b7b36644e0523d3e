//! Repeated-trial comparisons under a shared evaluation budget.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::functions::{eval_objective, ObjectiveSpec};
use super::local::{run_local_bo, LocalAscentParams};
use super::search::{grid_axes, grid_points, grid_size, record, run_random_search};
use super::BenchError;
use crate::acquisition::AcquisitionSpec;
use crate::boloop::{run_bo, BoConfig, BoResult, ObjectiveError, ObservationHistory};
use crate::gp::HyperFitOptions;
use crate::pso::PsoParams;
use crate::rng::stream;
use crate::space::{Point, SearchSpace};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum MethodSpec<T> {
    /// Bayesian optimization with the swarm maximizing the acquisition.
    PsoBo(PsoParams<T>),
    /// Bayesian optimization with multi-start local ascent instead.
    LocalBo(LocalAscentParams),
    RandomSearch,
    /// Without `points_per_dim`, the largest lattice that fits in the budget.
    /// Budget left over after the lattice is spent on uniform points.
    GridSearch { points_per_dim: Option<usize> },
}

impl<T: Scalar> MethodSpec<T> {
    pub fn label(&self) -> &'static str {
        match self {
            MethodSpec::PsoBo(_) => "pso_bo",
            MethodSpec::LocalBo(_) => "local_bo",
            MethodSpec::RandomSearch => "random_search",
            MethodSpec::GridSearch { .. } => "grid_search",
        }
    }
}

/// Everything shared by the cells of one comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment<T> {
    pub objective: ObjectiveSpec,
    pub space: SearchSpace<T>,
    pub acquisition: AcquisitionSpec<T>,
    pub gp: HyperFitOptions<T>,
    pub init_count: usize,
    pub iterations: usize,
    pub seeds: Vec<u64>,
    pub grid_cap: usize,
}

impl<T: Scalar> Experiment<T> {
    /// Canonical space of the objective, default acquisition and kernel fit,
    /// five initial points.
    pub fn new(objective: ObjectiveSpec, iterations: usize, seeds: Vec<u64>) -> Result<Self, BenchError> {
        let space = objective.space()?;
        Ok(Self {
            objective,
            space,
            acquisition: AcquisitionSpec::default(),
            gp: HyperFitOptions::default(),
            init_count: 5,
            iterations,
            seeds,
            grid_cap: super::DEFAULT_GRID_CAP,
        })
    }

    pub fn budget(&self) -> usize {
        self.init_count + self.iterations
    }

    fn bo_config(&self, pso: PsoParams<T>, seed: u64) -> BoConfig<T> {
        BoConfig {
            space: self.space.clone(),
            acquisition: self.acquisition.clone(),
            pso,
            gp: self.gp.clone(),
            init_count: self.init_count,
            iterations: self.iterations,
            seed,
        }
    }

    fn validate(&self) -> Result<(), BenchError> {
        self.objective.validate()?;
        if self.space.len() != self.objective.dims {
            return Err(BenchError::DimensionMismatch { expected: self.objective.dims, got: self.space.len() });
        }
        if self.seeds.len() < 2 {
            return Err(BenchError::InvalidExperiment("at least two seeds are required".into()));
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        if seeds.windows(2).any(|w| w[0] == w[1]) {
            return Err(BenchError::InvalidExperiment("seeds must be distinct".into()));
        }
        self.bo_config(PsoParams::default(), 0).validate()?;
        Ok(())
    }

    /// Lattice resolution used by grid search under this budget.
    fn grid_resolution(&self, points_per_dim: Option<usize>) -> Result<usize, BenchError> {
        let budget = self.budget();
        let size_at = |p: usize| -> Result<usize, BenchError> {
            Ok(grid_size(&grid_axes(&self.space, p)?).unwrap_or(usize::MAX))
        };
        match points_per_dim {
            Some(p) => {
                let size = size_at(p)?;
                if size > budget {
                    return Err(BenchError::BudgetParityViolation(format!(
                        "grid of {size} points exceeds the budget of {budget}"
                    )));
                }
                Ok(p)
            }
            None => {
                if size_at(2)? > budget {
                    return Err(BenchError::BudgetParityViolation(format!(
                        "even a 2-point grid exceeds the budget of {budget}"
                    )));
                }
                let mut p = 2;
                while p < budget && size_at(p + 1)? <= budget {
                    p += 1;
                }
                Ok(p)
            }
        }
    }
}

fn validate_method<T: Scalar>(exp: &Experiment<T>, method: &MethodSpec<T>) -> Result<(), BenchError> {
    match method {
        MethodSpec::PsoBo(p) => {
            p.validate().map_err(|e| BenchError::InvalidMethodParams(e.to_string()))?;
        }
        MethodSpec::LocalBo(p) => p.validate()?,
        MethodSpec::RandomSearch => {}
        MethodSpec::GridSearch { points_per_dim } => {
            exp.grid_resolution(*points_per_dim)?;
        }
    }
    Ok(())
}

/// One (method, seed) cell. Objective noise comes from the `noise` stream of
/// the seed, so every method sees the same noise sequence. `evaluations` of
/// the result is the number of objective calls actually made.
pub fn run_method<T: Scalar>(
    exp: &Experiment<T>,
    method: &MethodSpec<T>,
    seed: u64,
) -> Result<BoResult<T>, BenchError> {
    let mut noise = stream(seed, "noise");
    let spec = exp.objective.clone();
    let mut calls = 0usize;
    let mut objective = |x: &[T]| {
        calls += 1;
        eval_objective(&spec, x, &mut noise).map_err(|e| ObjectiveError(e.to_string()))
    };
    let mut result = match method {
        MethodSpec::PsoBo(p) => run_bo(&exp.bo_config(p.clone(), seed), &mut objective)?,
        MethodSpec::LocalBo(p) => run_local_bo(&exp.bo_config(PsoParams::default(), seed), &mut objective, p)?,
        MethodSpec::RandomSearch => {
            run_random_search(&exp.space, &mut objective, exp.budget(), &mut stream(seed, "random"))?
        }
        MethodSpec::GridSearch { points_per_dim } => {
            let p = exp.grid_resolution(*points_per_dim)?;
            let mut points: Vec<Point<T>> = grid_points(&exp.space, p, exp.grid_cap)?;
            let mut fill = stream(seed, "grid-fill");
            while points.len() < exp.budget() {
                points.push(exp.space.sample_uniform(&mut fill));
            }
            let mut history = ObservationHistory::default();
            for x in points {
                record(&mut history, &exp.space, x, &mut objective)?;
            }
            BoResult::from_history(history)?
        }
    };
    result.evaluations = calls;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedResult<T> {
    pub seed: u64,
    pub best_value: T,
    pub best_point: Point<T>,
    pub evaluations: usize,
    /// Best-so-far value after each evaluation.
    pub trace: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport<T> {
    pub method: String,
    pub max: T,
    pub min: T,
    pub ave: T,
    /// Evaluations per run, identical for every method of a report.
    pub evaluations: usize,
    /// Sorted by seed.
    pub per_seed: Vec<SeedResult<T>>,
    /// Seeds whose run failed; excluded from the statistics.
    pub missing: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport<T> {
    pub objective: ObjectiveSpec,
    pub budget: usize,
    pub seeds: Vec<u64>,
    pub methods: Vec<MethodReport<T>>,
}

impl<T: Scalar> ExperimentReport<T> {
    pub fn method(&self, label: &str) -> Option<&MethodReport<T>> {
        self.methods.iter().find(|m| m.method == label)
    }

    /// True when every recorded run used exactly `budget` evaluations.
    pub fn budget_parity(&self) -> bool {
        self.methods
            .iter()
            .all(|m| m.evaluations == self.budget && m.per_seed.iter().all(|s| s.evaluations == self.budget))
    }
}

/// `(max, min, ave)` of per-seed bests. The mean is accumulated relative to
/// the minimum, so identical values aggregate to exactly that value.
pub fn aggregate<T: Scalar>(values: &[T]) -> Option<(T, T, T)> {
    if values.is_empty() {
        return None;
    }
    let max = values.iter().copied().fold(T::neg_infinity(), T::max);
    let min = values.iter().copied().fold(T::infinity(), T::min);
    let excess = values.iter().fold(T::zero(), |a, &v| a + (v - min));
    let ave = (min + excess / T::of_usize(values.len())).max(min).min(max);
    Some((max, min, ave))
}

/// Runs every method on every seed. Cells run in parallel; results are
/// ordered by method then seed. A failed cell is logged and listed as
/// missing.
pub fn run_experiment<T: Scalar>(
    exp: &Experiment<T>,
    methods: &[MethodSpec<T>],
) -> Result<ExperimentReport<T>, BenchError> {
    exp.validate()?;
    if methods.is_empty() {
        return Err(BenchError::InvalidExperiment("no methods to run".into()));
    }
    for (i, m) in methods.iter().enumerate() {
        if methods[..i].iter().any(|o| o.label() == m.label()) {
            return Err(BenchError::InvalidExperiment(format!("method {} listed twice", m.label())));
        }
        validate_method(exp, m)?;
    }

    let mut seeds = exp.seeds.clone();
    seeds.sort_unstable();
    let cells: Vec<(usize, u64)> =
        (0..methods.len()).flat_map(|m| seeds.iter().map(move |&s| (m, s))).collect();
    let outcomes: Vec<Result<BoResult<T>, BenchError>> =
        cells.par_iter().map(|&(m, s)| run_method(exp, &methods[m], s)).collect();

    let budget = exp.budget();
    let mut reports = Vec::with_capacity(methods.len());
    let mut outcomes = outcomes.into_iter();
    for method in methods {
        let label = method.label().to_string();
        let mut per_seed = Vec::new();
        let mut missing = Vec::new();
        for &seed in &seeds {
            match outcomes.next().expect("one outcome per cell") {
                Ok(r) => {
                    if r.evaluations != budget {
                        return Err(BenchError::BudgetParityViolation(format!(
                            "{label} used {} evaluations with seed {seed}, expected {budget}",
                            r.evaluations
                        )));
                    }
                    per_seed.push(SeedResult {
                        seed,
                        best_value: r.best_value,
                        best_point: r.best_point,
                        evaluations: r.evaluations,
                        trace: r.incumbent_trace,
                    });
                }
                Err(e) => {
                    log::warn!("{label} failed with seed {seed}: {e}");
                    missing.push(seed);
                }
            }
        }
        let bests: Vec<T> = per_seed.iter().map(|s| s.best_value).collect();
        let (max, min, ave) = aggregate(&bests).ok_or_else(|| BenchError::AllRunsFailed(label.clone()))?;
        reports.push(MethodReport { method: label, max, min, ave, evaluations: budget, per_seed, missing });
    }
    Ok(ExperimentReport { objective: exp.objective.clone(), budget, seeds, methods: reports })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub omega: f64,
    pub ave_best: f64,
}

/// Mean final best of PSO-BO for each inertia weight, with the learning
/// factors of `base`.
pub fn omega_sweep<T: Scalar>(
    exp: &Experiment<T>,
    base: &PsoParams<T>,
    omegas: &[T],
) -> Result<Vec<SweepRow>, BenchError> {
    if omegas.is_empty() {
        return Err(BenchError::InvalidExperiment("no omega values to sweep".into()));
    }
    for &w in omegas {
        if base.clone().with_omega(w).check_stability().is_err() {
            return Err(BenchError::StabilityViolation { omega: w.as_f64() });
        }
    }
    omegas
        .iter()
        .map(|&w| {
            let report = run_experiment(exp, &[MethodSpec::PsoBo(base.clone().with_omega(w))])?;
            Ok(SweepRow { omega: w.as_f64(), ave_best: report.methods[0].ave.as_f64() })
        })
        .collect()
}
