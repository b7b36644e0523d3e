//! Standard test functions, in their usual minimization form.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::space::{Point, SearchSpace};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveName {
    Sphere,
    Rastrigin,
    Branin,
    Hartmann3,
    StyblinskiTang,
}

impl ObjectiveName {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveName::Sphere => "sphere",
            ObjectiveName::Rastrigin => "rastrigin",
            ObjectiveName::Branin => "branin",
            ObjectiveName::Hartmann3 => "hartmann3",
            ObjectiveName::StyblinskiTang => "styblinski_tang",
        }
    }

    /// Required dimensionality, if the function has a fixed arity.
    pub fn arity(self) -> Option<usize> {
        match self {
            ObjectiveName::Branin => Some(2),
            ObjectiveName::Hartmann3 => Some(3),
            _ => None,
        }
    }
}

fn default_negate() -> bool {
    true
}

/// A benchmark objective. With `negate` (the default) the harness maximizes
/// `-f`, so the best attainable value is `-f*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveSpec {
    pub name: ObjectiveName,
    pub dims: usize,
    #[serde(default)]
    pub noise_std: f64,
    #[serde(default = "default_negate")]
    pub negate: bool,
}

impl ObjectiveSpec {
    pub fn new(name: ObjectiveName, dims: usize) -> Self {
        Self { name, dims, noise_std: 0.0, negate: true }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.dims == 0 {
            return Err(BenchError::InvalidObjective("dims must be at least 1".into()));
        }
        if let Some(n) = self.name.arity() {
            if n != self.dims {
                return Err(BenchError::InvalidObjective(format!(
                    "{} is defined for {n} dimensions, got {}",
                    self.name.as_str(),
                    self.dims
                )));
            }
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(BenchError::InvalidObjective("noise_std must be a non-negative number".into()));
        }
        Ok(())
    }

    /// Canonical domain: Sphere and Styblinski-Tang on [-5, 5]^d, Rastrigin
    /// on [-5.12, 5.12]^d, Branin on [-5, 10] x [0, 15], Hartmann3 on [0, 1]^3.
    pub fn space<T: Scalar>(&self) -> Result<SearchSpace<T>, BenchError> {
        self.validate()?;
        let space = match self.name {
            ObjectiveName::Sphere | ObjectiveName::StyblinskiTang => {
                SearchSpace::uniform(self.dims, T::of(-5.0), T::of(5.0))
            }
            ObjectiveName::Rastrigin => SearchSpace::uniform(self.dims, T::of(-5.12), T::of(5.12)),
            ObjectiveName::Hartmann3 => SearchSpace::uniform(3, T::zero(), T::one()),
            ObjectiveName::Branin => SearchSpace::new(vec![
                crate::space::DimensionSpec::real("x1", T::of(-5.0), T::of(10.0)),
                crate::space::DimensionSpec::real("x2", T::zero(), T::of(15.0)),
            ]),
        };
        Ok(space?)
    }

    /// A global minimizer of the raw function.
    pub fn minimizer(&self) -> Point<f64> {
        match self.name {
            ObjectiveName::Sphere | ObjectiveName::Rastrigin => vec![0.0; self.dims],
            ObjectiveName::Branin => vec![std::f64::consts::PI, 2.275],
            ObjectiveName::Hartmann3 => vec![0.114_588_876_655, 0.555_648_894_617, 0.852_546_984_687],
            ObjectiveName::StyblinskiTang => vec![-2.903_534_027_771_177; self.dims],
        }
    }

    /// Global minimum of the raw function.
    pub fn minimum(&self) -> f64 {
        match self.name {
            ObjectiveName::Sphere | ObjectiveName::Rastrigin => 0.0,
            ObjectiveName::Branin => 0.397_887_357_729_738_3,
            ObjectiveName::Hartmann3 => -3.862_779_787_332_663,
            ObjectiveName::StyblinskiTang => -39.166_165_703_771_42 * self.dims as f64,
        }
    }

    /// Best value attainable by the maximizing harness.
    pub fn best_attainable(&self) -> f64 {
        if self.negate {
            -self.minimum()
        } else {
            self.minimum()
        }
    }

    /// Noise-free value of the raw function.
    pub fn raw<T: Scalar>(&self, x: &[T]) -> Result<T, BenchError> {
        if x.len() != self.dims {
            return Err(BenchError::DimensionMismatch { expected: self.dims, got: x.len() });
        }
        Ok(match self.name {
            ObjectiveName::Sphere => sphere(x),
            ObjectiveName::Rastrigin => rastrigin(x),
            ObjectiveName::Branin => branin(x),
            ObjectiveName::Hartmann3 => hartmann3(x),
            ObjectiveName::StyblinskiTang => styblinski_tang(x),
        })
    }
}

/// `(±) f(x) + ε` with `ε ~ N(0, noise_std²)` drawn from `rng`.
pub fn eval_objective<T: Scalar, R: Rng + ?Sized>(
    spec: &ObjectiveSpec,
    x: &[T],
    rng: &mut R,
) -> Result<T, BenchError> {
    let f = spec.raw(x)?;
    let f = if spec.negate { -f } else { f };
    if spec.noise_std > 0.0 {
        let normal = Normal::new(0.0, spec.noise_std)
            .map_err(|e| BenchError::InvalidObjective(e.to_string()))?;
        Ok(f + T::of(normal.sample(rng)))
    } else {
        Ok(f)
    }
}

pub fn sphere<T: Scalar>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |a, &v| a + v * v)
}

pub fn rastrigin<T: Scalar>(x: &[T]) -> T {
    let ten = T::of(10.0);
    let tau = T::of(2.0) * T::PI();
    x.iter().fold(ten * T::of_usize(x.len()), |a, &v| a + v * v - ten * (tau * v).cos())
}

pub fn branin<T: Scalar>(x: &[T]) -> T {
    let pi = T::PI();
    let b = T::of(5.1) / (T::of(4.0) * pi * pi);
    let c = T::of(5.0) / pi;
    let t = T::one() / (T::of(8.0) * pi);
    let (x1, x2) = (x[0], x[1]);
    let q = x2 - b * x1 * x1 + c * x1 - T::of(6.0);
    q * q + T::of(10.0) * (T::one() - t) * x1.cos() + T::of(10.0)
}

const H3_ALPHA: [f64; 4] = [1.0, 1.2, 3.0, 3.2];
const H3_A: [[f64; 3]; 4] = [[3.0, 10.0, 30.0], [0.1, 10.0, 35.0], [3.0, 10.0, 30.0], [0.1, 10.0, 35.0]];
const H3_P: [[f64; 3]; 4] = [
    [0.3689, 0.1170, 0.2673],
    [0.4699, 0.4387, 0.7470],
    [0.1091, 0.8732, 0.5547],
    [0.0381, 0.5743, 0.8828],
];

pub fn hartmann3<T: Scalar>(x: &[T]) -> T {
    let mut total = T::zero();
    for i in 0..4 {
        let mut inner = T::zero();
        for j in 0..3 {
            let d = x[j] - T::of(H3_P[i][j]);
            inner += T::of(H3_A[i][j]) * d * d;
        }
        total += T::of(H3_ALPHA[i]) * (-inner).exp();
    }
    -total
}

pub fn styblinski_tang<T: Scalar>(x: &[T]) -> T {
    let half = T::of(0.5);
    x.iter().fold(T::zero(), |a, &v| {
        let v2 = v * v;
        a + half * (v2 * v2 - T::of(16.0) * v2 + T::of(5.0) * v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn all(dims: usize) -> Vec<ObjectiveSpec> {
        vec![
            ObjectiveSpec::new(ObjectiveName::Sphere, dims),
            ObjectiveSpec::new(ObjectiveName::Rastrigin, dims),
            ObjectiveSpec::new(ObjectiveName::Branin, 2),
            ObjectiveSpec::new(ObjectiveName::Hartmann3, 3),
            ObjectiveSpec::new(ObjectiveName::StyblinskiTang, dims),
        ]
    }

    #[test]
    fn known_optima() {
        // Reference minima evaluated independently at 30 digits.
        for spec in all(4) {
            let v = spec.raw(&spec.minimizer()).unwrap();
            assert!((v - spec.minimum()).abs() < 1e-4, "{:?}: {v}", spec.name);
            let space = spec.space::<f64>().unwrap();
            assert_eq!(space.clamp(&spec.minimizer()).unwrap(), spec.minimizer());
        }
    }

    #[test]
    fn branin_reference_value() {
        let v: f64 = branin(&[std::f64::consts::PI, 2.275]);
        assert!((v - 0.397_887).abs() < 1e-4);
        let v = branin(&[-std::f64::consts::PI, 12.275]);
        assert!((v - 0.397_887_357_729_738).abs() < 1e-12);
    }

    #[test]
    fn hartmann3_reference_value() {
        let v: f64 = hartmann3(&[0.114_614, 0.555_649, 0.852_547]);
        assert!((v + 3.862_779_786_949_337).abs() < 1e-12);
    }

    #[test]
    fn negation_and_noise() {
        let mut rng = seeded(1);
        let sphere = ObjectiveSpec::new(ObjectiveName::Sphere, 3);
        assert_eq!(eval_objective(&sphere, &[0.0, 0.0, 0.0], &mut rng).unwrap(), 0.0);
        assert_eq!(eval_objective(&sphere, &[1.0, 0.0, 0.0], &mut rng).unwrap(), -1.0);
        let r = ObjectiveSpec::new(ObjectiveName::Rastrigin, 2);
        assert_eq!(eval_objective(&r, &[0.0, 0.0], &mut rng).unwrap(), 0.0);

        let noisy = ObjectiveSpec { noise_std: 0.5, ..sphere.clone() };
        let n = 20_000;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for _ in 0..n {
            let v = eval_objective(&noisy, &[0.0, 0.0, 0.0], &mut rng).unwrap();
            sum += v;
            sq += v * v;
        }
        let mean = sum / n as f64;
        let sd = (sq / n as f64 - mean * mean).sqrt();
        assert!(mean.abs() < 0.02 && (sd - 0.5).abs() < 0.02, "{mean} {sd}");
    }

    #[test]
    fn arity_and_dimension_checks() {
        assert!(ObjectiveSpec::new(ObjectiveName::Branin, 3).validate().is_err());
        assert!(ObjectiveSpec::new(ObjectiveName::Sphere, 0).validate().is_err());
        let s = ObjectiveSpec::new(ObjectiveName::Sphere, 2);
        assert_eq!(
            s.raw(&[1.0]).unwrap_err(),
            BenchError::DimensionMismatch { expected: 2, got: 1 }
        );
    }
}
