//! Bounded particle swarm maximizer.
//!
//! Each particle keeps a position `x`, velocity `v` and the best position it
//! has visited. Every iteration applies
//!
//! ```text
//! v <- omega * v + c1 * r1 * (p_best - x) + c2 * r2 * (g_best - x)
//! x <- x + v
//! ```
//!
//! with `r1`, `r2` uniform on `[0, 1]`, drawn independently per particle and
//! per dimension. Velocities are limited to `vmax_fraction` of each dimension's
//! range and positions are projected back onto the box.
//!
//! All random draws happen on the calling thread in particle-then-dimension
//! order; only fitness evaluations run in parallel. Results therefore do not
//! depend on the size of the rayon pool.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::space::{Point, SearchSpace};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PsoError {
    #[error("inertia weight {0} outside the open interval (-1, 1)")]
    OmegaOutOfRange(f64),
    #[error("learning factors c1 + c2 = {sum} outside (0, {limit}) for the given inertia weight")]
    LearningFactorsOutOfRange { sum: f64, limit: f64 },
    #[error("invalid swarm parameter: {0}")]
    InvalidParams(String),
    #[error("fitness of particle {particle} is NaN")]
    FitnessFailure { particle: usize },
    #[error("swarm dimension does not match the search space")]
    DimensionMismatch,
}

/// Swarm hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct PsoParams<T> {
    /// Inertia weight.
    pub omega: T,
    /// Cognitive learning factor (pull towards the particle's own best).
    pub c1: T,
    /// Social learning factor (pull towards the swarm's best).
    pub c2: T,
    pub population: usize,
    pub max_iters: usize,
    /// Velocity limit as a fraction of each dimension's range.
    pub vmax_fraction: T,
    /// Minimum improvement of the global best that resets the stagnation counter.
    pub tol: T,
    /// Consecutive stagnant iterations before stopping early; 0 disables early stopping.
    pub patience: usize,
}

impl<T: Scalar> Default for PsoParams<T> {
    fn default() -> Self {
        Self {
            omega: T::of(0.8),
            c1: T::of(1.85),
            c2: T::of(2.0),
            population: 40,
            max_iters: 100,
            vmax_fraction: T::of(0.5),
            tol: T::of(1e-8),
            patience: 15,
        }
    }
}

impl<T: Scalar> PsoParams<T> {
    /// Convergence region of the update rule: `-1 < omega < 1` and
    /// `0 < c1 + c2 < 4 (1 + omega)`, both strict.
    pub fn check_stability(&self) -> Result<(), PsoError> {
        let one = T::one();
        if !(self.omega > -one && self.omega < one) {
            return Err(PsoError::OmegaOutOfRange(self.omega.as_f64()));
        }
        let sum = self.c1 + self.c2;
        let limit = T::of(4.0) * (one + self.omega);
        if !(sum > T::zero() && sum < limit) {
            return Err(PsoError::LearningFactorsOutOfRange {
                sum: sum.as_f64(),
                limit: limit.as_f64(),
            });
        }
        Ok(())
    }

    /// Stability plus the structural constraints on the remaining fields.
    pub fn validate(&self) -> Result<(), PsoError> {
        self.check_stability()?;
        if self.population < 2 {
            return Err(PsoError::InvalidParams("population must be at least 2".into()));
        }
        if self.max_iters < 1 {
            return Err(PsoError::InvalidParams("max_iters must be at least 1".into()));
        }
        if !(self.vmax_fraction > T::zero() && self.vmax_fraction <= T::one()) {
            return Err(PsoError::InvalidParams("vmax_fraction must lie in (0, 1]".into()));
        }
        if !(self.tol >= T::zero()) {
            return Err(PsoError::InvalidParams("tol must be non-negative".into()));
        }
        Ok(())
    }

    pub fn with_omega(mut self, omega: T) -> Self {
        self.omega = omega;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle<T> {
    pub position: Point<T>,
    pub velocity: Vec<T>,
    pub best_position: Point<T>,
    pub best_fitness: T,
}

/// Snapshot of the swarm between iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState<T> {
    pub particles: Vec<Particle<T>>,
    pub global_best_position: Point<T>,
    pub global_best_fitness: T,
    pub iteration: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoOutcome<T> {
    pub best_position: Point<T>,
    pub best_fitness: T,
    /// Global best after initialization and after every completed iteration.
    pub trace: Vec<T>,
    pub evaluations: usize,
}

fn vmax<T: Scalar>(space: &SearchSpace<T>, params: &PsoParams<T>) -> Vec<T> {
    space.dims().iter().map(|d| params.vmax_fraction * d.range()).collect()
}

fn evaluate_all<T, F>(positions: &[Point<T>], fitness: &F) -> Result<Vec<T>, PsoError>
where
    T: Scalar,
    F: Fn(&[T]) -> T + Sync,
{
    let values: Vec<T> = positions.par_iter().map(|x| fitness(x)).collect();
    match values.iter().position(|v| v.is_nan()) {
        Some(particle) => Err(PsoError::FitnessFailure { particle }),
        None => Ok(values),
    }
}

/// Random positions and velocities, one fitness evaluation per particle.
pub fn init_swarm<T, F, R>(
    space: &SearchSpace<T>,
    params: &PsoParams<T>,
    fitness: &F,
    rng: &mut R,
) -> Result<SwarmState<T>, PsoError>
where
    T: Scalar,
    F: Fn(&[T]) -> T + Sync,
    R: Rng + ?Sized,
{
    params.validate()?;
    let vmax = vmax(space, params);
    let mut positions = Vec::with_capacity(params.population);
    let mut velocities = Vec::with_capacity(params.population);
    for _ in 0..params.population {
        positions.push(space.sample_uniform(rng));
        velocities.push(
            vmax.iter()
                .map(|&vm| (T::of(2.0) * T::of(rng.random::<f64>()) - T::one()) * vm)
                .collect::<Vec<T>>(),
        );
    }
    let values = evaluate_all(&positions, fitness)?;

    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    let particles: Vec<Particle<T>> = positions
        .into_iter()
        .zip(velocities)
        .zip(&values)
        .map(|((position, velocity), &f)| Particle {
            best_position: position.clone(),
            position,
            velocity,
            best_fitness: f,
        })
        .collect();
    Ok(SwarmState {
        global_best_position: particles[best].position.clone(),
        global_best_fitness: values[best],
        particles,
        iteration: 0,
    })
}

/// Applies the velocity and position update to one particle with the given
/// per-dimension random factors. Fitness and best positions are untouched.
pub fn advance_particle<T: Scalar>(
    particle: &mut Particle<T>,
    global_best: &[T],
    space: &SearchSpace<T>,
    params: &PsoParams<T>,
    vmax: &[T],
    r1: &[T],
    r2: &[T],
) {
    for j in 0..particle.position.len() {
        let x = particle.position[j];
        let v = params.omega * particle.velocity[j]
            + params.c1 * r1[j] * (particle.best_position[j] - x)
            + params.c2 * r2[j] * (global_best[j] - x);
        particle.velocity[j] = v.max(-vmax[j]).min(vmax[j]);
        particle.position[j] = x + particle.velocity[j];
    }
    space.clamp_in_place(&mut particle.position);
}

/// One synchronous iteration: move every particle, re-evaluate, then update
/// personal and global bests in index order. Ties keep the incumbent.
pub fn step_swarm<T, F, R>(
    mut state: SwarmState<T>,
    space: &SearchSpace<T>,
    params: &PsoParams<T>,
    fitness: &F,
    rng: &mut R,
) -> Result<SwarmState<T>, PsoError>
where
    T: Scalar,
    F: Fn(&[T]) -> T + Sync,
    R: Rng + ?Sized,
{
    let d = space.len();
    if state.global_best_position.len() != d {
        return Err(PsoError::DimensionMismatch);
    }
    let vmax = vmax(space, params);
    let mut r1 = vec![T::zero(); d];
    let mut r2 = vec![T::zero(); d];
    for particle in &mut state.particles {
        for j in 0..d {
            r1[j] = T::of(rng.random::<f64>());
            r2[j] = T::of(rng.random::<f64>());
        }
        advance_particle(particle, &state.global_best_position, space, params, &vmax, &r1, &r2);
    }

    let positions: Vec<Point<T>> = state.particles.iter().map(|p| p.position.clone()).collect();
    let values = evaluate_all(&positions, fitness)?;

    for (particle, &f) in state.particles.iter_mut().zip(&values) {
        if f > particle.best_fitness {
            particle.best_fitness = f;
            particle.best_position.clone_from(&particle.position);
        }
        if f > state.global_best_fitness {
            state.global_best_fitness = f;
            state.global_best_position.clone_from(&particle.position);
        }
    }
    state.iteration += 1;
    Ok(state)
}

/// Maximizes `fitness` over `space`.
///
/// Stops after `max_iters` iterations, or earlier once the global best has
/// improved by less than `tol` for `patience` consecutive iterations.
/// `fitness` may return `-inf` for infeasible points; NaN is an error.
pub fn run_pso<T, F, R>(
    space: &SearchSpace<T>,
    params: &PsoParams<T>,
    fitness: &F,
    rng: &mut R,
) -> Result<PsoOutcome<T>, PsoError>
where
    T: Scalar,
    F: Fn(&[T]) -> T + Sync,
    R: Rng + ?Sized,
{
    let mut state = init_swarm(space, params, fitness, rng)?;
    let mut trace = Vec::with_capacity(params.max_iters + 1);
    trace.push(state.global_best_fitness);
    let mut stagnant = 0;
    for _ in 0..params.max_iters {
        let previous = state.global_best_fitness;
        state = step_swarm(state, space, params, fitness, rng)?;
        trace.push(state.global_best_fitness);
        let gain = state.global_best_fitness - previous;
        if gain >= params.tol {
            stagnant = 0;
        } else {
            stagnant += 1;
        }
        if params.patience > 0 && stagnant >= params.patience {
            break;
        }
    }
    Ok(PsoOutcome {
        best_position: state.global_best_position,
        best_fitness: state.global_best_fitness,
        evaluations: params.population * trace.len(),
        trace,
    })
}
