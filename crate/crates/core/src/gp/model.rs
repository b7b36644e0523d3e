use super::kernel::{gram_unchecked, matern52_unchecked, KernelParams};
use super::GpError;
use crate::linalg::{dot, Cholesky, Matrix};
use crate::space::{Point, SearchSpace};
use crate::Scalar;

/// Smallest jitter, relative to `θ₀`, added to the diagonal before factoring.
const JITTER_START: f64 = 1e-10;
/// Largest jitter tried before giving up.
const JITTER_MAX: f64 = 1e-4;

/// Posterior of the latent function at one input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Posterior<T> {
    pub mean: T,
    /// Latent variance; observation noise is not included.
    pub var: T,
}

impl<T: Scalar> Posterior<T> {
    pub fn new(mean: T, var: T) -> Self {
        Self { mean, var }
    }

    pub fn std(&self) -> T {
        self.var.max(T::zero()).sqrt()
    }
}

/// Factors `K + (σ² + jitter) I`, escalating the jitter tenfold from
/// `1e-10 θ₀` up to `1e-4 θ₀`. Returns the factor and the jitter used.
pub(crate) fn factorize<T: Scalar>(
    xs: &[Point<T>],
    params: &KernelParams<T>,
) -> Result<(Cholesky<T>, T), GpError> {
    let mut k: Matrix<T> = gram_unchecked(xs, params);
    k.add_diagonal(params.noise_var);
    let mut rel = JITTER_START;
    let mut applied = T::zero();
    while rel <= JITTER_MAX * (1.0 + 1e-9) {
        let jitter = T::of(rel) * params.theta0;
        k.add_diagonal(jitter - applied);
        applied = jitter;
        if let Some(chol) = Cholesky::factor(&k) {
            return Ok((chol, jitter));
        }
        rel *= 10.0;
    }
    Err(GpError::FactorizationFailure)
}

fn lml_from<T: Scalar>(chol: &Cholesky<T>, alpha: &[T], ys: &[T]) -> T {
    let t = T::of_usize(ys.len());
    let half = T::of(0.5);
    -half * dot(ys, alpha) - half * chol.log_det() - half * t * (T::of(2.0) * T::PI()).ln()
}

/// Log marginal likelihood of `ys` under a zero-mean GP at inputs `xs`,
/// with no input or output scaling applied:
/// `−½ yᵀ(K+σ²I)⁻¹y − ½ log det(K+σ²I) − (t/2) log 2π`.
pub fn log_marginal_likelihood_of<T: Scalar>(
    xs: &[Point<T>],
    ys: &[T],
    params: &KernelParams<T>,
) -> Result<T, GpError> {
    if xs.len() != ys.len() {
        return Err(GpError::LengthMismatch { xs: xs.len(), ys: ys.len() });
    }
    if xs.is_empty() {
        return Err(GpError::EmptyData);
    }
    params.validate()?;
    if xs.iter().any(|x| x.len() != params.lengthscales.len()) {
        return Err(GpError::DimensionMismatch);
    }
    let (chol, _) = factorize(xs, params)?;
    let alpha = chol.solve(ys);
    Ok(lml_from(&chol, &alpha, ys))
}

/// Mean and standard deviation used to standardize targets. A degenerate
/// spread (single point or constant targets) falls back to 1.
pub(crate) fn standardization<T: Scalar>(ys: &[T]) -> (T, T) {
    let n = T::of_usize(ys.len());
    let mean = ys.iter().fold(T::zero(), |a, &b| a + b) / n;
    let var = ys.iter().fold(T::zero(), |a, &b| a + (b - mean) * (b - mean)) / n;
    let std = var.sqrt();
    if std > T::zero() && std.is_finite() {
        (mean, std)
    } else {
        (mean, T::one())
    }
}

/// Fitted zero-mean GP.
///
/// Inputs are mapped to the unit cube of the search space and targets are
/// standardized before fitting; [`GpModel::predict`] undoes the scaling.
#[derive(Debug, Clone)]
pub struct GpModel<T> {
    space: SearchSpace<T>,
    train_x: Vec<Point<T>>,
    train_y: Vec<T>,
    params: KernelParams<T>,
    factor: Cholesky<T>,
    alpha: Vec<T>,
    jitter: T,
    y_mean: T,
    y_std: T,
}

impl<T: Scalar> GpModel<T> {
    pub fn fit(
        space: &SearchSpace<T>,
        xs: &[Point<T>],
        ys: &[T],
        params: KernelParams<T>,
    ) -> Result<Self, GpError> {
        if xs.len() != ys.len() {
            return Err(GpError::LengthMismatch { xs: xs.len(), ys: ys.len() });
        }
        if xs.is_empty() {
            return Err(GpError::EmptyData);
        }
        params.validate()?;
        if params.lengthscales.len() != space.len() || xs.iter().any(|x| x.len() != space.len()) {
            return Err(GpError::DimensionMismatch);
        }
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(GpError::NonFiniteTarget);
        }
        let train_x: Vec<Point<T>> = xs.iter().map(|x| space.to_unit(x)).collect();
        let (y_mean, y_std) = standardization(ys);
        let train_y: Vec<T> = ys.iter().map(|&y| (y - y_mean) / y_std).collect();
        let (factor, jitter) = factorize(&train_x, &params)?;
        let alpha = factor.solve(&train_y);
        Ok(Self {
            space: space.clone(),
            train_x,
            train_y,
            params,
            factor,
            alpha,
            jitter,
            y_mean,
            y_std,
        })
    }

    pub fn params(&self) -> &KernelParams<T> {
        &self.params
    }

    pub fn space(&self) -> &SearchSpace<T> {
        &self.space
    }

    /// Training inputs in unit-cube coordinates.
    pub fn train_x(&self) -> &[Point<T>] {
        &self.train_x
    }

    /// Standardized training targets.
    pub fn train_y(&self) -> &[T] {
        &self.train_y
    }

    pub fn len(&self) -> usize {
        self.train_y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train_y.is_empty()
    }

    /// Lower-triangular factor of `K + σ²I` (plus jitter).
    pub fn factor(&self) -> &Matrix<T> {
        self.factor.lower()
    }

    /// Diagonal jitter that made the factorization succeed.
    pub fn jitter(&self) -> T {
        self.jitter
    }

    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    pub fn y_mean(&self) -> T {
        self.y_mean
    }

    pub fn y_std(&self) -> T {
        self.y_std
    }

    /// Posterior in standardized units at a unit-cube input.
    pub(crate) fn predict_unit(&self, u: &[T]) -> Posterior<T> {
        let k: Vec<T> = self
            .train_x
            .iter()
            .map(|xi| matern52_unchecked(xi, u, &self.params))
            .collect();
        let mean = dot(&k, &self.alpha);
        let v = self.factor.solve_lower(&k);
        let var = (self.params.theta0 - dot(&v, &v)).max(T::zero());
        Posterior { mean, var }
    }

    /// Posterior in standardized target units.
    pub fn predict_standardized(&self, x: &[T]) -> Result<Posterior<T>, GpError> {
        if x.len() != self.space.len() {
            return Err(GpError::DimensionMismatch);
        }
        Ok(self.predict_unit(&self.space.to_unit(x)))
    }

    /// Posterior mean `kᵀ(K+σ²I)⁻¹y` and latent variance
    /// `k(x,x) − kᵀ(K+σ²I)⁻¹k`, in the original target units.
    pub fn predict(&self, x: &[T]) -> Result<Posterior<T>, GpError> {
        let p = self.predict_standardized(x)?;
        Ok(Posterior {
            mean: self.y_mean + self.y_std * p.mean,
            var: self.y_std * self.y_std * p.var,
        })
    }

    /// Log marginal likelihood of the standardized targets.
    pub fn log_marginal_likelihood(&self) -> T {
        lml_from(&self.factor, &self.alpha, &self.train_y)
    }
}
