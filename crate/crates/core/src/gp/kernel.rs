use serde::{Deserialize, Serialize};

use super::GpError;
use crate::linalg::Matrix;
use crate::space::Point;
use crate::Scalar;

/// Matérn-5/2 parameters with one lengthscale per input dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelParams<T> {
    /// Signal variance.
    pub theta0: T,
    pub lengthscales: Vec<T>,
    /// Observation noise variance.
    pub noise_var: T,
}

impl<T: Scalar> KernelParams<T> {
    pub fn new(theta0: T, lengthscales: Vec<T>, noise_var: T) -> Self {
        Self { theta0, lengthscales, noise_var }
    }

    /// Isotropic parameters for `d` inputs.
    pub fn isotropic(d: usize, theta0: T, lengthscale: T, noise_var: T) -> Self {
        Self::new(theta0, vec![lengthscale; d], noise_var)
    }

    /// Fallback used when no data or no fit is available.
    pub fn fallback(d: usize) -> Self {
        Self::isotropic(d, T::one(), T::of(0.3), T::of(1e-6))
    }

    pub fn validate(&self) -> Result<(), GpError> {
        let ok = self.theta0 > T::zero()
            && self.theta0.is_finite()
            && !self.lengthscales.is_empty()
            && self.lengthscales.iter().all(|l| *l > T::zero() && l.is_finite())
            && self.noise_var >= T::zero()
            && self.noise_var.is_finite();
        if ok {
            Ok(())
        } else {
            Err(GpError::InvalidParams)
        }
    }
}

#[inline]
pub(crate) fn matern52_unchecked<T: Scalar>(a: &[T], b: &[T], params: &KernelParams<T>) -> T {
    let r2 = a
        .iter()
        .zip(b)
        .zip(&params.lengthscales)
        .fold(T::zero(), |acc, ((&x, &y), &l)| {
            let z = (x - y) / l;
            acc + z * z
        });
    let s = (T::of(5.0) * r2).sqrt();
    params.theta0 * (T::one() + s + T::of(5.0 / 3.0) * r2) * (-s).exp()
}

/// `θ₀ (1 + √(5r²) + 5r²/3) exp(−√(5r²))` with `r² = Σ (a_j − b_j)² / ℓ_j²`.
pub fn matern52<T: Scalar>(a: &[T], b: &[T], params: &KernelParams<T>) -> Result<T, GpError> {
    if a.len() != b.len() || a.len() != params.lengthscales.len() {
        return Err(GpError::DimensionMismatch);
    }
    params.validate()?;
    Ok(matern52_unchecked(a, b, params))
}

pub(crate) fn gram_unchecked<T: Scalar>(xs: &[Point<T>], params: &KernelParams<T>) -> Matrix<T> {
    let t = xs.len();
    let mut k = Matrix::zeros(t);
    for i in 0..t {
        k.set(i, i, params.theta0);
        for j in 0..i {
            let v = matern52_unchecked(&xs[i], &xs[j], params);
            k.set(i, j, v);
            k.set(j, i, v);
        }
    }
    k
}

/// Kernel matrix over `xs`; exactly symmetric with `θ₀` on the diagonal.
pub fn gram_matrix<T: Scalar>(xs: &[Point<T>], params: &KernelParams<T>) -> Result<Matrix<T>, GpError> {
    if xs.is_empty() {
        return Err(GpError::EmptyData);
    }
    params.validate()?;
    let d = params.lengthscales.len();
    if xs.iter().any(|x| x.len() != d) {
        return Err(GpError::DimensionMismatch);
    }
    Ok(gram_unchecked(xs, params))
}
