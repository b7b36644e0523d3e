//! Multi-start projected gradient ascent, the gradient-based baseline for
//! acquisition maximization.
//!
//! Works in unit-cube coordinates. Gradients are central finite differences
//! (one-sided at the boundary). Each step moves a distance `eta` along the
//! normalized projected gradient; `eta` is halved until the step improves and
//! doubled after a success. A restart ends when `eta` drops below
//! `min_step`, the gradient vanishes, or `max_steps` is reached.

use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::boloop::{
    run_bo_with, AcquisitionMaximizer, BoConfig, BoError, BoResult, ObjectiveError,
};
use crate::rng::SeedRng;
use crate::space::{Point, SearchSpace};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalAscentParams {
    pub restarts: usize,
    pub max_steps: usize,
    /// Finite-difference step as a fraction of each dimension's range.
    pub fd_step: f64,
    /// Initial step length in unit-cube units.
    pub initial_step: f64,
    pub min_step: f64,
}

impl Default for LocalAscentParams {
    fn default() -> Self {
        Self { restarts: 10, max_steps: 200, fd_step: 1e-6, initial_step: 0.1, min_step: 1e-10 }
    }
}

impl LocalAscentParams {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.restarts == 0 {
            return Err(BenchError::InvalidMethodParams("local ascent needs at least one restart".into()));
        }
        if self.max_steps == 0 {
            return Err(BenchError::InvalidMethodParams("max_steps must be at least 1".into()));
        }
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.fd_step) || !positive(self.initial_step) || !positive(self.min_step) {
            return Err(BenchError::InvalidMethodParams("step sizes must be positive".into()));
        }
        Ok(())
    }
}

fn score<T: Scalar>(f: &(dyn Fn(&[T]) -> T + Sync), space: &SearchSpace<T>, u: &[T]) -> T {
    let v = f(&space.from_unit(u));
    if v.is_nan() {
        T::neg_infinity()
    } else {
        v
    }
}

fn ascend<T: Scalar>(
    f: &(dyn Fn(&[T]) -> T + Sync),
    space: &SearchSpace<T>,
    params: &LocalAscentParams,
    mut u: Vec<T>,
) -> (Vec<T>, T) {
    let d = u.len();
    let (zero, one) = (T::zero(), T::one());
    let h = T::of(params.fd_step);
    let min_step = T::of(params.min_step);
    let mut fu = score(f, space, &u);
    let mut eta = T::of(params.initial_step);
    let mut grad = vec![zero; d];
    let mut probe = u.clone();

    for _ in 0..params.max_steps {
        for j in 0..d {
            let hi = (u[j] + h).min(one);
            let lo = (u[j] - h).max(zero);
            probe.copy_from_slice(&u);
            probe[j] = hi;
            let f_hi = score(f, space, &probe);
            probe[j] = lo;
            let f_lo = score(f, space, &probe);
            let g = (f_hi - f_lo) / (hi - lo);
            // Project out components pushing through an active bound.
            grad[j] = if !g.is_finite() || (u[j] <= zero && g < zero) || (u[j] >= one && g > zero) {
                zero
            } else {
                g
            };
        }
        let norm = grad.iter().fold(zero, |a, &g| a + g * g).sqrt();
        if norm <= zero {
            break;
        }
        let mut moved = false;
        while eta >= min_step {
            for j in 0..d {
                probe[j] = (u[j] + eta * grad[j] / norm).max(zero).min(one);
            }
            let fp = score(f, space, &probe);
            if fp > fu {
                u.copy_from_slice(&probe);
                fu = fp;
                eta = (eta * T::of(2.0)).min(one);
                moved = true;
                break;
            }
            eta = eta * T::of(0.5);
        }
        if !moved {
            break;
        }
    }
    (u, fu)
}

/// Best point over `params.restarts` ascents started from uniform points.
pub fn local_ascent_maximize<T: Scalar>(
    space: &SearchSpace<T>,
    f: &(dyn Fn(&[T]) -> T + Sync),
    params: &LocalAscentParams,
    rng: &mut SeedRng,
) -> Result<(Point<T>, T), BenchError> {
    params.validate()?;
    let mut best: Option<(Vec<T>, T)> = None;
    for _ in 0..params.restarts {
        let start = space.to_unit(&space.sample_uniform(rng));
        let (u, fu) = ascend(f, space, params, start);
        if best.as_ref().is_none_or(|(_, b)| fu > *b) {
            best = Some((u, fu));
        }
    }
    let (u, fu) = best.expect("at least one restart");
    let mut x = space.from_unit(&u);
    space.clamp_in_place(&mut x);
    Ok((x, fu))
}

/// [`AcquisitionMaximizer`] adapter for the local-ascent baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalAscentMaximizer(pub LocalAscentParams);

impl<T: Scalar> AcquisitionMaximizer<T> for LocalAscentMaximizer {
    fn maximize(
        &self,
        space: &SearchSpace<T>,
        acquisition: &(dyn Fn(&[T]) -> T + Sync),
        rng: &mut SeedRng,
    ) -> Result<Point<T>, BoError> {
        local_ascent_maximize(space, acquisition, &self.0, rng)
            .map(|(x, _)| x)
            .map_err(|e| BoError::InvalidConfig(e.to_string()))
    }
}

/// The optimization loop of [`crate::boloop::run_bo`] with local ascent in
/// place of the swarm. Same budget and random streams.
pub fn run_local_bo<T, O>(
    config: &BoConfig<T>,
    objective: &mut O,
    params: &LocalAscentParams,
) -> Result<BoResult<T>, BenchError>
where
    T: Scalar,
    O: FnMut(&[T]) -> Result<T, ObjectiveError>,
{
    params.validate()?;
    Ok(run_bo_with(config, objective, &LocalAscentMaximizer(params.clone()))?)
}
