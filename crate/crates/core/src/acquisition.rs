//! Acquisition functions over GP posteriors.
//!
//! Everything here maximizes: larger acquisition values mark more promising
//! inputs, and EI/PI measure improvement above the incumbent.

use serde::{Deserialize, Serialize};

use crate::gp::{GpError, GpModel, Posterior};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AcquisitionKind {
    Ucb,
    Ei,
    Pi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct AcquisitionSpec<T> {
    pub kind: AcquisitionKind,
    /// UCB exploration weight.
    pub gamma: T,
    /// Improvement margin for EI and PI.
    pub xi: T,
    /// Best observed value; set by the optimization loop before each step.
    #[serde(skip)]
    pub incumbent: T,
}

impl<T: Scalar> Default for AcquisitionSpec<T> {
    fn default() -> Self {
        Self { kind: AcquisitionKind::Ucb, gamma: T::of(2.0), xi: T::of(0.01), incumbent: T::zero() }
    }
}

impl<T: Scalar> AcquisitionSpec<T> {
    pub fn ucb(gamma: T) -> Self {
        Self { kind: AcquisitionKind::Ucb, gamma, ..Self::default() }
    }

    pub fn ei(xi: T, incumbent: T) -> Self {
        Self { kind: AcquisitionKind::Ei, xi, incumbent, ..Self::default() }
    }

    pub fn pi(xi: T, incumbent: T) -> Self {
        Self { kind: AcquisitionKind::Pi, xi, incumbent, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.gamma >= T::zero() && self.gamma.is_finite()) {
            return Err(format!("gamma must be a non-negative number, got {}", self.gamma));
        }
        if !(self.xi >= T::zero() && self.xi.is_finite()) {
            return Err(format!("xi must be a non-negative number, got {}", self.xi));
        }
        Ok(())
    }

    /// Scores a posterior.
    pub fn score(&self, post: &Posterior<T>) -> T {
        match self.kind {
            AcquisitionKind::Ucb => ucb(post, self.gamma),
            AcquisitionKind::Ei => ei(post, self.incumbent, self.xi),
            AcquisitionKind::Pi => pi(post, self.incumbent, self.xi),
        }
    }
}

/// Standard normal density.
pub fn normal_pdf<T: Scalar>(z: T) -> T {
    (-(z * z) * T::of(0.5)).exp() / (T::of(2.0) * T::PI()).sqrt()
}

/// Standard normal distribution function, `½ erfc(−z/√2)`, evaluated in `f64`.
pub fn normal_cdf<T: Scalar>(z: T) -> T {
    T::of(0.5 * libm::erfc(-z.as_f64() / std::f64::consts::SQRT_2))
}

/// `μ + γ σ`.
pub fn ucb<T: Scalar>(post: &Posterior<T>, gamma: T) -> T {
    post.mean + gamma * post.std()
}

/// Expected improvement over `incumbent + xi`.
pub fn ei<T: Scalar>(post: &Posterior<T>, incumbent: T, xi: T) -> T {
    let gain = post.mean - incumbent - xi;
    let sigma = post.std();
    if sigma <= T::zero() {
        return gain.max(T::zero());
    }
    let z = gain / sigma;
    (gain * normal_cdf(z) + sigma * normal_pdf(z)).max(T::zero())
}

/// Probability of improving on `incumbent + xi`.
pub fn pi<T: Scalar>(post: &Posterior<T>, incumbent: T, xi: T) -> T {
    let gain = post.mean - incumbent - xi;
    let sigma = post.std();
    if sigma <= T::zero() {
        return if gain > T::zero() { T::one() } else { T::zero() };
    }
    normal_cdf(gain / sigma)
}

/// Acquisition value of `spec` at `x` under `model`.
pub fn evaluate<T: Scalar>(spec: &AcquisitionSpec<T>, model: &GpModel<T>, x: &[T]) -> Result<T, GpError> {
    Ok(spec.score(&model.predict(x)?))
}
