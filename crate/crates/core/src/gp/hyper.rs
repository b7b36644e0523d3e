use rand::Rng;
use serde::{Deserialize, Serialize};

use super::kernel::KernelParams;
use super::model::{factorize, standardization};
use super::GpError;
use crate::linalg::dot;
use crate::pso::{run_pso, PsoParams};
use crate::space::{DimensionSpec, Point, SearchSpace};
use crate::Scalar;

/// Search box (natural units) and swarm settings for kernel fitting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct HyperFitOptions<T> {
    pub theta0_bounds: [T; 2],
    /// Lengthscale bounds in unit-cube units.
    pub lengthscale_bounds: [T; 2],
    pub noise_var_bounds: [T; 2],
    /// Pins the noise variance (standardized units) instead of fitting it.
    pub noise_var: Option<T>,
    pub pso: PsoParams<T>,
}

impl<T: Scalar> Default for HyperFitOptions<T> {
    fn default() -> Self {
        Self {
            theta0_bounds: [T::of(1e-3), T::of(1e3)],
            lengthscale_bounds: [T::of(1e-2), T::of(1e2)],
            noise_var_bounds: [T::of(1e-8), T::one()],
            noise_var: None,
            pso: PsoParams::default(),
        }
    }
}

impl<T: Scalar> HyperFitOptions<T> {
    pub fn validate(&self) -> Result<(), GpError> {
        let positive_box = |b: &[T; 2]| b[0] > T::zero() && b[0] < b[1] && b[1].is_finite();
        if !positive_box(&self.theta0_bounds)
            || !positive_box(&self.lengthscale_bounds)
            || !positive_box(&self.noise_var_bounds)
        {
            return Err(GpError::InvalidBounds);
        }
        if let Some(n) = self.noise_var {
            if !(n >= T::zero() && n.is_finite()) {
                return Err(GpError::InvalidParams);
            }
        }
        self.pso.validate().map_err(GpError::Fit)
    }

    fn log_space(&self, d: usize) -> SearchSpace<T> {
        let ln = |b: &[T; 2]| (b[0].ln(), b[1].ln());
        let (t_lo, t_hi) = ln(&self.theta0_bounds);
        let (l_lo, l_hi) = ln(&self.lengthscale_bounds);
        let mut dims = vec![DimensionSpec::real("log_theta0", t_lo, t_hi)];
        dims.extend((0..d).map(|j| DimensionSpec::real(format!("log_lengthscale{j}"), l_lo, l_hi)));
        if self.noise_var.is_none() {
            let (n_lo, n_hi) = ln(&self.noise_var_bounds);
            dims.push(DimensionSpec::real("log_noise_var", n_lo, n_hi));
        }
        SearchSpace::new(dims).expect("validated bounds form a valid space")
    }

    /// Maps log-parameters back, clamping away exp/ln round-off at the bounds.
    fn decode(&self, z: &[T], d: usize) -> KernelParams<T> {
        let within = |v: T, b: &[T; 2]| v.exp().max(b[0]).min(b[1]);
        KernelParams {
            theta0: within(z[0], &self.theta0_bounds),
            lengthscales: z[1..=d].iter().map(|&v| within(v, &self.lengthscale_bounds)).collect(),
            noise_var: match self.noise_var {
                Some(n) => n,
                None => within(z[d + 1], &self.noise_var_bounds),
            },
        }
    }
}

/// Maximizes the log marginal likelihood over log-parameters with the swarm.
///
/// Works on the same scaled data as [`super::GpModel::fit`]. Candidates whose
/// Gram matrix cannot be factored score `-inf`; if every candidate fails the
/// fallback parameters are returned.
pub fn fit_hyperparams<T, R>(
    space: &SearchSpace<T>,
    xs: &[Point<T>],
    ys: &[T],
    options: &HyperFitOptions<T>,
    rng: &mut R,
) -> Result<KernelParams<T>, GpError>
where
    T: Scalar,
    R: Rng + ?Sized,
{
    if xs.len() != ys.len() {
        return Err(GpError::LengthMismatch { xs: xs.len(), ys: ys.len() });
    }
    if xs.len() < 2 {
        return Err(GpError::InsufficientData);
    }
    if xs.iter().any(|x| x.len() != space.len()) {
        return Err(GpError::DimensionMismatch);
    }
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(GpError::NonFiniteTarget);
    }
    options.validate()?;

    let d = space.len();
    let unit: Vec<Point<T>> = xs.iter().map(|x| space.to_unit(x)).collect();
    let (mean, std) = standardization(ys);
    let y: Vec<T> = ys.iter().map(|&v| (v - mean) / std).collect();
    let half = T::of(0.5);
    let norm = half * T::of_usize(y.len()) * (T::of(2.0) * T::PI()).ln();

    let objective = |z: &[T]| -> T {
        let params = options.decode(z, d);
        match factorize(&unit, &params) {
            Ok((chol, _)) => {
                let alpha = chol.solve(&y);
                let v = -half * dot(&y, &alpha) - half * chol.log_det() - norm;
                if v.is_nan() {
                    T::neg_infinity()
                } else {
                    v
                }
            }
            Err(_) => T::neg_infinity(),
        }
    };

    let out = run_pso(&options.log_space(d), &options.pso, &objective, rng)?;
    if out.best_fitness == T::neg_infinity() {
        log::warn!("no kernel candidate could be factored; using fallback parameters");
        let mut params = KernelParams::fallback(d);
        if let Some(n) = options.noise_var {
            params.noise_var = n;
        }
        return Ok(params);
    }
    Ok(options.decode(&out.best_position, d))
}
