//! Model-free baselines: uniform random search and exhaustive grid search.
//!
//! Both return a [`BoResult`] whose records are all in the `Init` phase, so
//! reports and traces treat every method alike.

use rand::Rng;

use super::BenchError;
use crate::boloop::{BoError, BoResult, ObjectiveError, ObservationHistory, Phase, Record};
use crate::space::{DimKind, Point, SearchSpace};
use crate::Scalar;

pub const DEFAULT_GRID_CAP: usize = 1_000_000;

pub(crate) fn record<T, O>(
    history: &mut ObservationHistory<T>,
    space: &SearchSpace<T>,
    point: Point<T>,
    objective: &mut O,
) -> Result<(), BenchError>
where
    T: Scalar,
    O: FnMut(&[T]) -> Result<T, ObjectiveError>,
{
    let index = history.len();
    let materialized = space.materialize(&point)?;
    let y = objective(&materialized).map_err(|source| BoError::ObjectiveFailure { index, source })?;
    if y.is_nan() {
        let source = ObjectiveError("objective returned NaN".into());
        return Err(BoError::ObjectiveFailure { index, source }.into());
    }
    history.records.push(Record { point, materialized, y, iteration: index, phase: Phase::Init });
    Ok(())
}

/// Evaluates `budget` uniform points and keeps the best.
pub fn run_random_search<T, O, R>(
    space: &SearchSpace<T>,
    objective: &mut O,
    budget: usize,
    rng: &mut R,
) -> Result<BoResult<T>, BenchError>
where
    T: Scalar,
    O: FnMut(&[T]) -> Result<T, ObjectiveError>,
    R: Rng + ?Sized,
{
    if budget == 0 {
        return Err(BenchError::InvalidMethodParams("random search budget must be at least 1".into()));
    }
    let mut history = ObservationHistory::default();
    for _ in 0..budget {
        let x = space.sample_uniform(rng);
        record(&mut history, space, x, objective)?;
    }
    Ok(BoResult::from_history(history)?)
}

/// Grid coordinates of every dimension. Real dimensions get `points_per_dim`
/// evenly spaced values including both bounds; integer dimensions get their
/// full integer lattice when it has at most `points_per_dim` values, and the
/// rounded evenly spaced values otherwise.
pub fn grid_axes<T: Scalar>(space: &SearchSpace<T>, points_per_dim: usize) -> Result<Vec<Vec<T>>, BenchError> {
    if points_per_dim < 2 {
        return Err(BenchError::InvalidMethodParams("grid search needs at least 2 points per dimension".into()));
    }
    let steps = T::of_usize(points_per_dim - 1);
    let axes = space
        .dims()
        .iter()
        .map(|d| {
            let linspace = |lo: T, hi: T| -> Vec<T> {
                (0..points_per_dim)
                    .map(|i| if i + 1 == points_per_dim { hi } else { lo + (hi - lo) * T::of_usize(i) / steps })
                    .collect()
            };
            match d.kind {
                DimKind::Real => linspace(d.lower, d.upper),
                DimKind::Integer => {
                    let (lo, hi) = (d.lower.ceil(), d.upper.floor());
                    let count = (hi - lo).as_f64() as usize + 1;
                    if count <= points_per_dim {
                        (0..count).map(|i| lo + T::of_usize(i)).collect()
                    } else {
                        let mut v: Vec<T> = linspace(lo, hi).into_iter().map(|x| x.round()).collect();
                        v.dedup();
                        v
                    }
                }
            }
        })
        .collect();
    Ok(axes)
}

/// Number of lattice points, or `None` on overflow.
pub fn grid_size<T>(axes: &[Vec<T>]) -> Option<usize> {
    axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.len()))
}

/// The full lattice in row-major order (last dimension varies fastest).
pub fn grid_points<T: Scalar>(
    space: &SearchSpace<T>,
    points_per_dim: usize,
    cap: usize,
) -> Result<Vec<Point<T>>, BenchError> {
    let axes = grid_axes(space, points_per_dim)?;
    let size = grid_size(&axes).unwrap_or(usize::MAX);
    if size > cap {
        return Err(BenchError::GridTooLarge { size, cap });
    }
    let mut points = Vec::with_capacity(size);
    let mut idx = vec![0usize; axes.len()];
    for _ in 0..size {
        points.push(idx.iter().zip(&axes).map(|(&i, a)| a[i]).collect());
        for j in (0..axes.len()).rev() {
            idx[j] += 1;
            if idx[j] < axes[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
    Ok(points)
}

/// Evaluates every lattice point and keeps the best (earliest on ties).
pub fn run_grid_search<T, O>(
    space: &SearchSpace<T>,
    objective: &mut O,
    points_per_dim: usize,
    cap: usize,
) -> Result<BoResult<T>, BenchError>
where
    T: Scalar,
    O: FnMut(&[T]) -> Result<T, ObjectiveError>,
{
    let points = grid_points(space, points_per_dim, cap)?;
    let mut history = ObservationHistory::default();
    for x in points {
        record(&mut history, space, x, objective)?;
    }
    Ok(BoResult::from_history(history)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::space::DimensionSpec;

    #[test]
    fn grid_on_unit_line() {
        let space = SearchSpace::uniform(1, 0.0, 1.0).unwrap();
        let mut seen = Vec::new();
        let r = run_grid_search(&space, &mut |x: &[f64]| {
            seen.push(x[0]);
            Ok(-x[0])
        }, 3, DEFAULT_GRID_CAP)
        .unwrap();
        assert_eq!(seen, vec![0.0, 0.5, 1.0]);
        assert_eq!(r.best_point, vec![0.0]);
        assert_eq!(r.evaluations, 3);
    }

    #[test]
    fn integer_lattice_when_coarser() {
        let space = SearchSpace::new(vec![DimensionSpec::integer("k", 2.0, 4.0)]).unwrap();
        for p in [2, 3, 10] {
            let mut pts: Vec<f64> = grid_points(&space, p, DEFAULT_GRID_CAP).unwrap().into_iter().map(|x| x[0]).collect();
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            if p >= 3 {
                assert_eq!(pts, vec![2.0, 3.0, 4.0]);
            } else {
                assert_eq!(pts, vec![2.0, 4.0]);
            }
        }
    }

    #[test]
    fn oversized_grid_rejected() {
        let space = SearchSpace::uniform(7, 0.0, 1.0).unwrap();
        let err = run_grid_search(&space, &mut |_: &[f64]| Ok(0.0), 10, DEFAULT_GRID_CAP).unwrap_err();
        assert_eq!(err, BenchError::GridTooLarge { size: 10_000_000, cap: DEFAULT_GRID_CAP });
        assert!(grid_points(&space, 1, DEFAULT_GRID_CAP).is_err());
    }

    #[test]
    fn lattice_order_and_size() {
        let space = SearchSpace::uniform(2, 0.0, 1.0).unwrap();
        let pts = grid_points(&space, 2, 100).unwrap();
        assert_eq!(pts, vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]);
    }

    #[test]
    fn random_search_basics() {
        let space = SearchSpace::uniform(2, -1.0, 1.0).unwrap();
        let r = run_random_search(&space, &mut |x: &[f64]| Ok(x[0] + x[1]), 1, &mut seeded(4)).unwrap();
        assert_eq!(r.evaluations, 1);
        assert_eq!(r.best_value, r.history.records[0].y);
        let r = run_random_search(&space, &mut |_: &[f64]| Ok(2.5), 20, &mut seeded(4)).unwrap();
        assert_eq!(r.best_value, 2.5);
        assert!(run_random_search(&space, &mut |_: &[f64]| Ok(0.0), 0, &mut seeded(4)).is_err());
    }

    #[test]
    fn random_search_on_sphere() {
        let space = SearchSpace::uniform(2, -5.0, 5.0).unwrap();
        let hits = (0..10)
            .filter(|&s| {
                let r = run_random_search(&space, &mut |x: &[f64]| Ok(-(x[0] * x[0] + x[1] * x[1])), 10_000, &mut seeded(s))
                    .unwrap();
                r.best_value >= -0.05
            })
            .count();
        assert!(hits >= 9, "{hits}");
    }
}
