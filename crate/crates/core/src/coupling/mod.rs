//! Maximal-coupling sampler over density-oracle distributions.
//!
//! [`lazy_sample`] takes a draw `x ~ Q` and returns a draw from `P`, keeping
//! `x` itself whenever possible. The probability of leaving `x` (a
//! "resample") equals `TV(Q, P)`, which is the smallest possible for any
//! coupling of the two laws.

use rand::{Rng, RngCore};

use crate::error::{check_dim, Error, Result};

mod discrete;
mod gaussian;
pub mod validation;

pub use discrete::tv_discrete;
pub use gaussian::{kl_gaussian, tv_gaussian_1d, tv_upper_pinsker, GaussianSpec};

/// Upper bound on proposals drawn by the rejection loop before the oracles
/// are declared inconsistent.
pub const ITERATION_CAP: u64 = 10_000_000;

/// A distribution exposed through density and sampling oracles.
///
/// Densities are handled in log space; `log_density` may return
/// `f64::NEG_INFINITY` off the support.
pub trait DensityDist {
    fn dimension(&self) -> usize;
    fn log_density(&self, x: &[f64]) -> f64;
    fn sample(&self, rng: &mut dyn RngCore) -> Vec<f64>;

    fn density(&self, x: &[f64]) -> f64 {
        self.log_density(x).exp()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoupledSample {
    pub value: Vec<f64>,
    /// True iff the rejection loop ran and `value` is a fresh draw from `P`.
    pub resampled: bool,
    /// Proposals drawn from `P`; zero iff `resampled` is false.
    pub loop_iterations: u64,
}

/// Couple a draw `x ~ Q` to a draw from `P`.
///
/// With `z ~ Unif[0, Q(x)]`, `x` is kept when `P(x) > z`. Otherwise proposals
/// `y ~ P` are drawn until `z' ~ Unif[0, P(y)]` exceeds `Q(y)`. Both tests are
/// evaluated as `ln u + ln A < ln B`, which is the same strict comparison
/// without underflow.
///
/// The caller must supply `x` drawn from `Q`; the marginal and
/// resample-probability guarantees rest on that.
pub fn lazy_sample<Q, P>(x: &[f64], q: &Q, p: &P, rng: &mut dyn RngCore) -> Result<CoupledSample>
where
    Q: DensityDist + ?Sized,
    P: DensityDist + ?Sized,
{
    lazy_sample_capped(x, q, p, rng, ITERATION_CAP)
}

pub(crate) fn lazy_sample_capped<Q, P>(
    x: &[f64],
    q: &Q,
    p: &P,
    rng: &mut dyn RngCore,
    cap: u64,
) -> Result<CoupledSample>
where
    Q: DensityDist + ?Sized,
    P: DensityDist + ?Sized,
{
    check_dim(q.dimension(), x.len())?;
    check_dim(q.dimension(), p.dimension())?;

    let log_qx = q.log_density(x);
    if log_qx.is_nan() || log_qx == f64::NEG_INFINITY {
        return Err(Error::ZeroDensity);
    }
    let u: f64 = rng.random();
    if u.ln() + log_qx < p.log_density(x) {
        return Ok(CoupledSample {
            value: x.to_vec(),
            resampled: false,
            loop_iterations: 0,
        });
    }

    for iteration in 1..=cap {
        let y = p.sample(rng);
        let u: f64 = rng.random();
        if u.ln() + p.log_density(&y) > q.log_density(&y) {
            return Ok(CoupledSample {
                value: y,
                resampled: true,
                loop_iterations: iteration,
            });
        }
    }
    Err(Error::SamplerIterationCap { cap })
}
