//! Bounded mixed real/integer search domains.
//!
//! Integer dimensions are optimized in continuous relaxation. A point keeps a
//! real coordinate for every dimension; [`SearchSpace::materialize`] rounds the
//! integer ones when the point is handed to an objective or reported.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Scalar;

/// A point in the continuous representation of a space.
pub type Point<T> = Vec<T>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("search space has no dimensions")]
    EmptySpace,
    #[error("dimension `{0}`: lower bound must be strictly below upper bound")]
    InvertedBounds(String),
    #[error("dimension `{0}`: integer range contains no integer")]
    EmptyIntegerRange(String),
    #[error("dimension name `{0}` is used more than once")]
    DuplicateName(String),
    #[error("point has {got} coordinates, space has {expected} dimensions")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DimKind {
    Real,
    Integer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionSpec<T> {
    pub name: String,
    #[serde(rename = "type")]
    pub kind: DimKind,
    pub lower: T,
    pub upper: T,
}

impl<T: Scalar> DimensionSpec<T> {
    pub fn real(name: impl Into<String>, lower: T, upper: T) -> Self {
        Self { name: name.into(), kind: DimKind::Real, lower, upper }
    }

    pub fn integer(name: impl Into<String>, lower: T, upper: T) -> Self {
        Self { name: name.into(), kind: DimKind::Integer, lower, upper }
    }

    pub fn range(&self) -> T {
        self.upper - self.lower
    }

    /// Bounds of the values this dimension can take after materialization.
    fn feasible_bounds(&self) -> (T, T) {
        match self.kind {
            DimKind::Real => (self.lower, self.upper),
            DimKind::Integer => (self.lower.ceil(), self.upper.floor()),
        }
    }

    fn validate(&self) -> Result<(), SpaceError> {
        // Written so that NaN bounds fail as well.
        if !(self.lower < self.upper) || !self.lower.is_finite() || !self.upper.is_finite() {
            return Err(SpaceError::InvertedBounds(self.name.clone()));
        }
        if self.kind == DimKind::Integer && self.upper.floor() < self.lower.ceil() {
            return Err(SpaceError::EmptyIntegerRange(self.name.clone()));
        }
        Ok(())
    }
}

/// Checks every dimension invariant, reporting the first offending dimension.
pub fn validate_space<T: Scalar>(dims: &[DimensionSpec<T>]) -> Result<(), SpaceError> {
    if dims.is_empty() {
        return Err(SpaceError::EmptySpace);
    }
    let mut seen = HashSet::new();
    for dim in dims {
        dim.validate()?;
        if !seen.insert(dim.name.as_str()) {
            return Err(SpaceError::DuplicateName(dim.name.clone()));
        }
    }
    Ok(())
}

/// Ordered list of validated dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<DimensionSpec<T>>", into = "Vec<DimensionSpec<T>>")]
#[serde(bound(
    serialize = "T: Scalar + Serialize",
    deserialize = "T: Scalar + Deserialize<'de>"
))]
pub struct SearchSpace<T> {
    dims: Vec<DimensionSpec<T>>,
}

impl<T: Scalar> TryFrom<Vec<DimensionSpec<T>>> for SearchSpace<T> {
    type Error = SpaceError;

    fn try_from(dims: Vec<DimensionSpec<T>>) -> Result<Self, Self::Error> {
        Self::new(dims)
    }
}

impl<T> From<SearchSpace<T>> for Vec<DimensionSpec<T>> {
    fn from(space: SearchSpace<T>) -> Self {
        space.dims
    }
}

impl<T: Scalar> SearchSpace<T> {
    pub fn new(dims: Vec<DimensionSpec<T>>) -> Result<Self, SpaceError> {
        validate_space(&dims)?;
        Ok(Self { dims })
    }

    /// `d` real dimensions named `x0`, `x1`, ... sharing the same bounds.
    pub fn uniform(d: usize, lower: T, upper: T) -> Result<Self, SpaceError> {
        Self::new(
            (0..d)
                .map(|j| DimensionSpec::real(format!("x{j}"), lower, upper))
                .collect(),
        )
    }

    pub fn dims(&self) -> &[DimensionSpec<T>] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn has_integer_dims(&self) -> bool {
        self.dims.iter().any(|d| d.kind == DimKind::Integer)
    }

    pub fn check_len(&self, x: &[T]) -> Result<(), SpaceError> {
        if x.len() == self.dims.len() {
            Ok(())
        } else {
            Err(SpaceError::DimensionMismatch { expected: self.dims.len(), got: x.len() })
        }
    }

    /// Draws each coordinate independently and uniformly within its bounds.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point<T> {
        self.dims
            .iter()
            .map(|d| {
                let u = T::of(rng.random::<f64>());
                (d.lower + u * d.range()).min(d.upper)
            })
            .collect()
    }

    /// Coordinate-wise projection onto the box.
    pub fn clamp(&self, x: &[T]) -> Result<Point<T>, SpaceError> {
        self.check_len(x)?;
        let mut out = x.to_vec();
        self.clamp_in_place(&mut out);
        Ok(out)
    }

    /// Projection without the length check; `x` must have `self.len()` entries.
    pub fn clamp_in_place(&self, x: &mut [T]) {
        debug_assert_eq!(x.len(), self.dims.len());
        for (v, d) in x.iter_mut().zip(&self.dims) {
            *v = v.max(d.lower).min(d.upper);
        }
    }

    /// Rounds integer coordinates (half away from zero) and clamps them to the
    /// integers inside their range. Real coordinates are only clamped.
    pub fn materialize(&self, x: &[T]) -> Result<Point<T>, SpaceError> {
        self.check_len(x)?;
        Ok(x.iter()
            .zip(&self.dims)
            .map(|(&v, d)| {
                let (lo, hi) = d.feasible_bounds();
                let v = match d.kind {
                    DimKind::Real => v,
                    DimKind::Integer => v.round(),
                };
                v.max(lo).min(hi)
            })
            .collect())
    }

    /// True when `x` lies in the box and integer coordinates are integral.
    pub fn contains_materialized(&self, x: &[T]) -> bool {
        x.len() == self.dims.len()
            && x.iter().zip(&self.dims).all(|(&v, d)| {
                v >= d.lower && v <= d.upper && (d.kind == DimKind::Real || v.fract() == T::zero())
            })
    }

    /// Maps `x` affinely onto the unit cube.
    pub fn to_unit(&self, x: &[T]) -> Point<T> {
        x.iter().zip(&self.dims).map(|(&v, d)| (v - d.lower) / d.range()).collect()
    }

    /// Inverse of [`SearchSpace::to_unit`].
    pub fn from_unit(&self, u: &[T]) -> Point<T> {
        u.iter().zip(&self.dims).map(|(&v, d)| d.lower + v * d.range()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;

    fn rf_table() -> Vec<DimensionSpec<f64>> {
        vec![
            DimensionSpec::real("max_features", 0.1, 0.999),
            DimensionSpec::integer("n_estimators", 10.0, 250.0),
            DimensionSpec::integer("min_samples_split", 2.0, 25.0),
            DimensionSpec::integer("max_depth", 5.0, 15.0),
        ]
    }

    #[test]
    fn random_forest_ranges_validate() {
        assert_eq!(validate_space(&rf_table()), Ok(()));
    }

    #[test]
    fn degenerate_interval_is_inverted() {
        let dims = vec![DimensionSpec::real("a", 1.0, 1.0)];
        assert_eq!(validate_space(&dims), Err(SpaceError::InvertedBounds("a".into())));
    }

    #[test]
    fn integer_range_without_integer() {
        let dims = vec![DimensionSpec::integer("k", 0.2, 0.8)];
        assert_eq!(validate_space(&dims), Err(SpaceError::EmptyIntegerRange("k".into())));
    }

    #[test]
    fn empty_and_duplicate() {
        assert_eq!(validate_space::<f64>(&[]), Err(SpaceError::EmptySpace));
        let dims = vec![DimensionSpec::real("a", 0.0, 1.0), DimensionSpec::real("a", 0.0, 2.0)];
        assert_eq!(validate_space(&dims), Err(SpaceError::DuplicateName("a".into())));
        let nan = vec![DimensionSpec::real("n", f64::NAN, 1.0)];
        assert_eq!(validate_space(&nan), Err(SpaceError::InvertedBounds("n".into())));
    }

    #[test]
    fn sampling_is_reproducible_and_bounded() {
        let space = SearchSpace::<f64>::uniform(1, 0.0, 1.0).unwrap();
        let a = space.sample_uniform(&mut seeded(11));
        let b = space.sample_uniform(&mut seeded(11));
        assert_eq!(a[0].to_bits(), b[0].to_bits());
        assert!((0.0..=1.0).contains(&a[0]));

        let space = SearchSpace::new(vec![
            DimensionSpec::real("a", -3.0, -1.0),
            DimensionSpec::integer("b", 2.0, 25.0),
        ])
        .unwrap();
        let mut rng = seeded(3);
        for _ in 0..1000 {
            let x = space.sample_uniform(&mut rng);
            assert!((-3.0..=-1.0).contains(&x[0]));
            assert!((2.0..=25.0).contains(&x[1]));
        }
    }

    #[test]
    fn sample_mean_matches_midpoint() {
        let space = SearchSpace::new(vec![DimensionSpec::real("n", 10.0, 250.0)]).unwrap();
        let mut rng = seeded(2024);
        let n = 100_000;
        let mut acc = 0.0;
        for _ in 0..n {
            acc += space.sample_uniform(&mut rng)[0];
        }
        let mean = acc / n as f64;
        assert!((mean - 130.0).abs() < 2.0, "mean {mean}");
    }

    #[test]
    fn clamp_cases() {
        let space = SearchSpace::uniform(1, 0.0, 1.0).unwrap();
        assert_eq!(space.clamp(&[0.25]).unwrap(), vec![0.25]);
        assert_eq!(space.clamp(&[1.7]).unwrap(), vec![1.0]);
        assert_eq!(space.clamp(&[-0.5]).unwrap(), vec![0.0]);
        assert_eq!(
            space.clamp(&[0.1, 0.2]),
            Err(SpaceError::DimensionMismatch { expected: 1, got: 2 })
        );
    }

    #[test]
    fn materialize_cases() {
        let space = SearchSpace::new(vec![
            DimensionSpec::integer("n", 10.0, 250.0),
            DimensionSpec::real("r", 0.1, 0.999),
        ])
        .unwrap();
        assert_eq!(space.materialize(&[127.4, 0.5]).unwrap(), vec![127.0, 0.5]);
        assert_eq!(space.materialize(&[250.0, 0.5]).unwrap(), vec![250.0, 0.5]);
        assert_eq!(space.materialize(&[127.5, 0.5]).unwrap(), vec![128.0, 0.5]);
        assert!(space.materialize(&[1.0]).is_err());
    }

    #[test]
    fn materialize_stays_on_integers_inside_fractional_bounds() {
        let space = SearchSpace::new(vec![DimensionSpec::integer("k", 0.2, 3.8)]).unwrap();
        assert_eq!(space.materialize(&[0.3]).unwrap(), vec![1.0]);
        assert_eq!(space.materialize(&[3.7]).unwrap(), vec![3.0]);
    }

    #[test]
    fn single_precision_space() {
        let space = SearchSpace::<f32>::uniform(2, -1.0, 1.0).unwrap();
        let x = space.sample_uniform(&mut seeded(5));
        assert!(x.iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    fn arb_space() -> impl Strategy<Value = SearchSpace<f64>> {
        prop::collection::vec((-100.0f64..100.0, 0.5f64..50.0, any::<bool>()), 1..5).prop_map(|v| {
            SearchSpace::new(
                v.into_iter()
                    .enumerate()
                    .map(|(j, (lo, w, int))| DimensionSpec {
                        name: format!("d{j}"),
                        kind: if int { DimKind::Integer } else { DimKind::Real },
                        lower: lo,
                        upper: lo + w + 1.0,
                    })
                    .collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn clamp_idempotent_and_monotone(
            space in arb_space(),
            raw in prop::collection::vec(-500.0f64..500.0, 5),
            shift in prop::collection::vec(0.0f64..50.0, 5),
        ) {
            let d = space.len();
            let x = &raw[..d];
            let y: Vec<f64> = x.iter().zip(&shift).map(|(a, s)| a + s).collect();
            let cx = space.clamp(x).unwrap();
            prop_assert_eq!(space.clamp(&cx).unwrap(), cx.clone());
            let cy = space.clamp(&y).unwrap();
            for j in 0..d {
                prop_assert!(cx[j] <= cy[j]);
            }
        }

        #[test]
        fn materialize_idempotent(space in arb_space(), raw in prop::collection::vec(-500.0f64..500.0, 5)) {
            let x = space.clamp(&raw[..space.len()]).unwrap();
            let m = space.materialize(&x).unwrap();
            prop_assert_eq!(space.materialize(&m).unwrap(), m.clone());
            prop_assert!(space.contains_materialized(&m));
        }

        #[test]
        fn samples_are_fixed_points_of_clamp(space in arb_space(), seed in any::<u64>()) {
            let x = space.sample_uniform(&mut seeded(seed));
            prop_assert_eq!(space.clamp(&x).unwrap(), x);
        }
    }
}
