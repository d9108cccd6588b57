//! Convex loss families, their sums, and hindsight minimizers.

use std::fmt;
use std::sync::Arc;

use rand::RngCore;

use crate::error::{check_dim, Error, Result};
use crate::geometry::Domain;
use crate::linalg;
use crate::solver::{self, PgdOptions};

mod text;

pub use text::{parse_loss_sequence, peek_dimension, write_loss_sequence};

/// A black-box convex loss. Implementations must tolerate concurrent
/// read-only calls.
pub trait LossOracle: Send + Sync + fmt::Debug {
    fn dimension(&self) -> usize;
    fn eval(&self, w: &[f64]) -> f64;
    fn gradient(&self, w: &[f64]) -> Vec<f64>;
}

/// Wraps a pair of closures as a [`LossOracle`].
pub struct FnOracle<F, G> {
    dimension: usize,
    eval: F,
    gradient: G,
}

impl<F, G> FnOracle<F, G>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    pub fn new(dimension: usize, eval: F, gradient: G) -> Self {
        FnOracle {
            dimension,
            eval,
            gradient,
        }
    }
}

impl<F, G> fmt::Debug for FnOracle<F, G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnOracle")
            .field("dimension", &self.dimension)
            .finish_non_exhaustive()
    }
}

impl<F, G> LossOracle for FnOracle<F, G>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    fn dimension(&self) -> usize {
        self.dimension
    }
    fn eval(&self, w: &[f64]) -> f64 {
        (self.eval)(w)
    }
    fn gradient(&self, w: &[f64]) -> Vec<f64> {
        (self.gradient)(w)
    }
}

#[derive(Clone, Debug)]
pub enum LossForm {
    /// `f(w) = g·w`
    Linear {
        g: Vec<f64>,
    },
    /// `f(w) = (lambda / 2) |w - center|^2`
    IsoQuadratic {
        lambda: f64,
        center: Vec<f64>,
    },
    Custom(Arc<dyn LossOracle>),
}

impl PartialEq for LossForm {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (LossForm::Linear { g: a }, LossForm::Linear { g: b }) => a == b,
            (
                LossForm::IsoQuadratic {
                    lambda: la,
                    center: ca,
                },
                LossForm::IsoQuadratic {
                    lambda: lb,
                    center: cb,
                },
            ) => la == lb && ca == cb,
            (LossForm::Custom(a), LossForm::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

/// A convex loss with its declared Lipschitz bound `G` and strong-convexity
/// modulus `lambda`.
#[derive(Clone, Debug, PartialEq)]
pub struct LossFn {
    form: LossForm,
    lipschitz: f64,
    strong_convexity: f64,
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("{what} must be finite")));
    }
    Ok(())
}

impl LossFn {
    /// Linear loss; `G = |g|`.
    pub fn linear(g: Vec<f64>) -> Result<Self> {
        if g.is_empty() {
            return Err(Error::InvalidParameter("empty gradient".into()));
        }
        check_finite(&g, "linear coefficients")?;
        let lipschitz = linalg::norm(&g);
        Ok(LossFn {
            form: LossForm::Linear { g },
            lipschitz,
            strong_convexity: 0.0,
        })
    }

    /// Isotropic quadratic with `G = lambda * (D + dist(center, W))`, the
    /// largest gradient norm attainable on `domain`.
    pub fn iso_quadratic(lambda: f64, center: Vec<f64>, domain: &Domain) -> Result<Self> {
        check_dim(domain.dimension(), center.len())?;
        check_finite(&center, "quadratic center")?;
        let g = lambda * (domain.diameter() + domain.distance(&center)?);
        Self::iso_quadratic_with_lipschitz(lambda, center, g)
    }

    pub fn iso_quadratic_with_lipschitz(
        lambda: f64,
        center: Vec<f64>,
        lipschitz: f64,
    ) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "quadratic curvature must be positive (got {lambda})"
            )));
        }
        if center.is_empty() {
            return Err(Error::InvalidParameter("empty center".into()));
        }
        check_finite(&center, "quadratic center")?;
        let loss = LossFn {
            form: LossForm::IsoQuadratic { lambda, center },
            lipschitz: 0.0,
            strong_convexity: lambda,
        };
        loss.with_lipschitz(lipschitz)
    }

    /// Custom oracle with user-declared `G` and `lambda`. Use
    /// [`LossFn::check_lipschitz`] to spot-check the declared `G`.
    pub fn custom(
        oracle: Arc<dyn LossOracle>,
        lipschitz: f64,
        strong_convexity: f64,
    ) -> Result<Self> {
        if oracle.dimension() == 0 {
            return Err(Error::InvalidParameter("custom loss of dimension 0".into()));
        }
        if !(strong_convexity >= 0.0) || !strong_convexity.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "strong convexity must be >= 0 (got {strong_convexity})"
            )));
        }
        let loss = LossFn {
            form: LossForm::Custom(oracle),
            lipschitz: 0.0,
            strong_convexity,
        };
        loss.with_lipschitz(lipschitz)
    }

    /// Override the declared Lipschitz bound.
    pub fn with_lipschitz(mut self, lipschitz: f64) -> Result<Self> {
        if !(lipschitz >= 0.0) || !lipschitz.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Lipschitz bound must be finite and >= 0 (got {lipschitz})"
            )));
        }
        self.lipschitz = lipschitz;
        Ok(self)
    }

    pub fn form(&self) -> &LossForm {
        &self.form
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn strong_convexity(&self) -> f64 {
        self.strong_convexity
    }

    pub fn dimension(&self) -> usize {
        match &self.form {
            LossForm::Linear { g } => g.len(),
            LossForm::IsoQuadratic { center, .. } => center.len(),
            LossForm::Custom(o) => o.dimension(),
        }
    }

    pub fn eval(&self, w: &[f64]) -> Result<f64> {
        check_dim(self.dimension(), w.len())?;
        Ok(self.eval_unchecked(w))
    }

    pub fn gradient(&self, w: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dimension(), w.len())?;
        Ok(self.gradient_unchecked(w))
    }

    pub(crate) fn eval_unchecked(&self, w: &[f64]) -> f64 {
        match &self.form {
            LossForm::Linear { g } => linalg::dot(g, w),
            LossForm::IsoQuadratic { lambda, center } => {
                let d = linalg::dist(w, center);
                0.5 * lambda * d * d
            }
            LossForm::Custom(o) => o.eval(w),
        }
    }

    pub(crate) fn gradient_unchecked(&self, w: &[f64]) -> Vec<f64> {
        match &self.form {
            LossForm::Linear { g } => g.clone(),
            LossForm::IsoQuadratic { lambda, center } => w
                .iter()
                .zip(center)
                .map(|(wi, ci)| lambda * (wi - ci))
                .collect(),
            LossForm::Custom(o) => o.gradient(w),
        }
    }

    /// Spot-check the declared `G` at `samples` uniform points of `domain`.
    /// Violations are logged as warnings and counted, never raised.
    pub fn check_lipschitz(
        &self,
        domain: &Domain,
        samples: usize,
        rng: &mut dyn RngCore,
    ) -> Result<usize> {
        check_dim(domain.dimension(), self.dimension())?;
        let mut violations = 0;
        for _ in 0..samples {
            let w = domain.sample_uniform(rng);
            let n = linalg::norm(&self.gradient_unchecked(&w));
            if n > self.lipschitz * (1.0 + 1e-9) + 1e-12 {
                violations += 1;
                log::warn!(
                    "gradient norm {n} exceeds declared Lipschitz bound {} at {w:?}",
                    self.lipschitz
                );
            }
        }
        Ok(violations)
    }
}

/// A nonempty sequence of losses of common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct LossSequence {
    losses: Vec<LossFn>,
}

impl LossSequence {
    pub fn new(losses: Vec<LossFn>) -> Result<Self> {
        let first = losses.first().ok_or(Error::EmptySequence)?;
        let d = first.dimension();
        for l in &losses {
            check_dim(d, l.dimension())?;
        }
        Ok(LossSequence { losses })
    }

    pub fn len(&self) -> usize {
        self.losses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.losses.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.losses[0].dimension()
    }

    pub fn losses(&self) -> &[LossFn] {
        &self.losses
    }

    pub fn get(&self, index: usize) -> Option<&LossFn> {
        self.losses.get(index)
    }

    /// Largest declared `G` over the sequence.
    pub fn max_lipschitz(&self) -> f64 {
        self.losses
            .iter()
            .map(LossFn::lipschitz)
            .fold(0.0, f64::max)
    }

    /// Smallest declared `lambda` over the sequence.
    pub fn min_strong_convexity(&self) -> f64 {
        self.losses
            .iter()
            .map(LossFn::strong_convexity)
            .fold(f64::INFINITY, f64::min)
    }

    /// `sum_t f_t(w)`
    pub fn total(&self, w: &[f64]) -> Result<f64> {
        check_dim(self.dimension(), w.len())?;
        Ok(self.losses.iter().map(|l| l.eval_unchecked(w)).sum())
    }
}

/// Sufficient statistics of a running sum of losses.
///
/// Linear and isotropic-quadratic terms collapse into
/// `(Lambda/2)|w|^2 - m·w + b·w + const`; custom terms are retained.
#[derive(Clone, Debug)]
pub struct LossSum {
    dimension: usize,
    linear: Vec<f64>,
    quad_moment: Vec<f64>,
    quad_weight: f64,
    quad_offset: f64,
    custom: Vec<LossFn>,
    custom_modulus: f64,
    count: usize,
}

impl LossSum {
    pub fn new(dimension: usize) -> Self {
        LossSum {
            dimension,
            linear: vec![0.0; dimension],
            quad_moment: vec![0.0; dimension],
            quad_weight: 0.0,
            quad_offset: 0.0,
            custom: Vec::new(),
            custom_modulus: 0.0,
            count: 0,
        }
    }

    pub fn add(&mut self, loss: &LossFn) -> Result<()> {
        check_dim(self.dimension, loss.dimension())?;
        match &loss.form {
            LossForm::Linear { g } => linalg::axpy(1.0, g, &mut self.linear),
            LossForm::IsoQuadratic { lambda, center } => {
                linalg::axpy(*lambda, center, &mut self.quad_moment);
                self.quad_weight += lambda;
                self.quad_offset += 0.5 * lambda * linalg::dot(center, center);
            }
            LossForm::Custom(_) => {
                self.custom_modulus += loss.strong_convexity;
                self.custom.push(loss.clone());
            }
        }
        self.count += 1;
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Strong-convexity modulus of the sum (declared values for custom terms).
    pub fn modulus(&self) -> f64 {
        self.quad_weight + self.custom_modulus
    }

    pub fn has_custom(&self) -> bool {
        !self.custom.is_empty()
    }

    /// Accumulated linear coefficients.
    pub fn linear_part(&self) -> &[f64] {
        &self.linear
    }

    /// `sum lambda_i * center_i` over quadratic terms.
    pub fn quadratic_moment(&self) -> &[f64] {
        &self.quad_moment
    }

    /// `sum lambda_i` over quadratic terms.
    pub fn quadratic_weight(&self) -> f64 {
        self.quad_weight
    }

    pub(crate) fn value(&self, w: &[f64]) -> f64 {
        let closed = 0.5 * self.quad_weight * linalg::dot(w, w) - linalg::dot(&self.quad_moment, w)
            + self.quad_offset
            + linalg::dot(&self.linear, w);
        closed + self.custom.iter().map(|l| l.eval_unchecked(w)).sum::<f64>()
    }

    pub(crate) fn gradient(&self, w: &[f64]) -> Vec<f64> {
        let mut g: Vec<f64> = w
            .iter()
            .zip(&self.quad_moment)
            .zip(&self.linear)
            .map(|((wi, mi), bi)| self.quad_weight * wi - mi + bi)
            .collect();
        for l in &self.custom {
            linalg::axpy(1.0, &l.gradient_unchecked(w), &mut g);
        }
        g
    }
}

/// Extra terms added on top of a [`LossSum`] before minimizing: a linear
/// tilt `p·w` and an optional proximal term `|w - anchor|^2 / (2 eta)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Augment<'a> {
    pub tilt: Option<&'a [f64]>,
    pub prox: Option<(f64, &'a [f64])>,
}

impl Augment<'_> {
    pub(crate) const NONE: Augment<'static> = Augment {
        tilt: None,
        prox: None,
    };
}

/// Minimize `sum(w) + tilt·w + prox(w)` over `domain`.
///
/// Without custom terms the objective is an isotropic quadratic plus a linear
/// term, so the constrained minimizer is the projection of the unconstrained
/// one; with zero curvature it is a linear minimizer and `fallback` resolves
/// ties. Custom terms go through projected gradient descent from `warm_start`.
pub(crate) fn minimize(
    sum: &LossSum,
    aug: Augment<'_>,
    domain: &Domain,
    fallback: &[f64],
    warm_start: &[f64],
) -> Result<Vec<f64>> {
    check_dim(domain.dimension(), sum.dimension)?;
    let d = sum.dimension;
    let mut b = sum.linear.clone();
    if let Some(p) = aug.tilt {
        check_dim(d, p.len())?;
        linalg::axpy(1.0, p, &mut b);
    }
    let mut curvature = sum.quad_weight;
    let mut pull = sum.quad_moment.clone();
    if let Some((eta, anchor)) = aug.prox {
        check_dim(d, anchor.len())?;
        curvature += 1.0 / eta;
        linalg::axpy(1.0 / eta, anchor, &mut pull);
    }

    if !sum.has_custom() {
        if curvature > 0.0 {
            let x: Vec<f64> = pull
                .iter()
                .zip(&b)
                .map(|(m, bi)| (m - bi) / curvature)
                .collect();
            return domain.project(&x);
        }
        return domain.linear_minimizer(&b, fallback);
    }

    let value = |w: &[f64]| {
        let mut v = sum.value(w);
        if let Some(p) = aug.tilt {
            v += linalg::dot(p, w);
        }
        if let Some((eta, anchor)) = aug.prox {
            let r = linalg::dist(w, anchor);
            v += r * r / (2.0 * eta);
        }
        v
    };
    let grad = |w: &[f64]| {
        let mut g = sum.gradient(w);
        if let Some(p) = aug.tilt {
            linalg::axpy(1.0, p, &mut g);
        }
        if let Some((eta, anchor)) = aug.prox {
            for ((gi, wi), ai) in g.iter_mut().zip(w).zip(anchor) {
                *gi += (wi - ai) / eta;
            }
        }
        g
    };
    let modulus = curvature + sum.custom_modulus;
    let opts = PgdOptions {
        initial_step: if modulus > 0.0 { 1.0 / modulus } else { 1.0 },
        ..PgdOptions::default()
    };
    solver::projected_gradient(domain, warm_start, value, grad, opts)
}

/// Best fixed decision in hindsight and its cumulative loss.
///
/// Linear and quadratic terms (in any mix) are solved in closed form; a
/// zero linear total resolves to `project(0)`. Sequences with custom terms
/// are solved by projected gradient descent.
pub fn offline_optimum(seq: &LossSequence, domain: &Domain) -> Result<(Vec<f64>, f64)> {
    check_dim(domain.dimension(), seq.dimension())?;
    let mut sum = LossSum::new(seq.dimension());
    for l in seq.losses() {
        sum.add(l)?;
    }
    let origin = domain.project(&vec![0.0; seq.dimension()])?;
    let w = minimize(&sum, Augment::NONE, domain, &origin, &domain.center())?;
    let value = seq.total(&w)?;
    Ok((w, value))
}

/// Per-prefix minimizers `w_1*, ..., w_T*`.
///
/// When a linear prefix total is zero (or has zero coordinates on a box),
/// the previous leader is retained; the first fallback is `project(0)`.
pub fn leader_sequence(seq: &LossSequence, domain: &Domain) -> Result<Vec<Vec<f64>>> {
    check_dim(domain.dimension(), seq.dimension())?;
    let mut sum = LossSum::new(seq.dimension());
    let mut previous = domain.project(&vec![0.0; seq.dimension()])?;
    let mut leaders = Vec::with_capacity(seq.len());
    for l in seq.losses() {
        sum.add(l)?;
        let w = minimize(&sum, Augment::NONE, domain, &previous, &previous)?;
        previous = w.clone();
        leaders.push(w);
    }
    Ok(leaders)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert, proptest};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit() -> Domain {
        Domain::interval(-1.0, 1.0).unwrap()
    }

    fn quartic() -> LossFn {
        let o = FnOracle::new(
            1,
            |w: &[f64]| w[0].powi(4),
            |w: &[f64]| vec![4.0 * w[0].powi(3)],
        );
        LossFn::custom(Arc::new(o), 4.0, 0.0).unwrap()
    }

    #[test]
    fn eval_examples() {
        let l = LossFn::linear(vec![1.0, -1.0]).unwrap();
        assert_eq!(l.eval(&[0.5, 0.5]).unwrap(), 0.0);
        let q = LossFn::iso_quadratic(1.0, vec![0.3], &unit()).unwrap();
        assert!((q.eval(&[0.5]).unwrap() - 0.02).abs() < 1e-15);
        let b = LossFn::linear(vec![1.0]).unwrap();
        assert_eq!(b.eval(&[-1.0]).unwrap(), -1.0);
        assert!(l.eval(&[0.0]).is_err());
    }

    #[test]
    fn gradient_examples() {
        let l = LossFn::linear(vec![2.0, 0.0]).unwrap();
        assert_eq!(l.gradient(&[7.0, -3.0]).unwrap(), vec![2.0, 0.0]);
        let dom = Domain::cube(2, -1.0, 1.0).unwrap();
        let q = LossFn::iso_quadratic(2.0, vec![1.0, 0.0], &dom).unwrap();
        assert_eq!(q.gradient(&[0.0, 0.0]).unwrap(), vec![-2.0, 0.0]);
        assert_eq!(quartic().gradient(&[0.0]).unwrap(), vec![0.0]);
        assert!(q.gradient(&[0.0]).is_err());
    }

    #[test]
    fn metadata() {
        let l = LossFn::linear(vec![3.0, 4.0]).unwrap();
        assert_eq!((l.lipschitz(), l.strong_convexity()), (5.0, 0.0));
        // lambda (D + dist(center, W)) = 1 * (2 + 1)
        let q = LossFn::iso_quadratic(1.0, vec![2.0], &unit()).unwrap();
        assert_eq!(q.lipschitz(), 3.0);
        assert!(LossFn::iso_quadratic_with_lipschitz(0.0, vec![0.0], 1.0).is_err());
        assert!(LossFn::linear(vec![f64::NAN]).is_err());
        assert!(LossFn::linear(vec![]).is_err());
    }

    #[test]
    fn lipschitz_spot_check_warns_without_failing() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bad = quartic().with_lipschitz(0.5).unwrap();
        assert!(bad.check_lipschitz(&unit(), 200, &mut rng).unwrap() > 0);
        assert_eq!(
            quartic().check_lipschitz(&unit(), 200, &mut rng).unwrap(),
            0
        );
    }

    #[test]
    fn gradients_match_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dom = Domain::cube(3, -1.0, 1.0).unwrap();
        let custom = {
            let o = FnOracle::new(
                3,
                |w: &[f64]| w.iter().map(|x| (1.0 + x * x).ln() + x.powi(4)).sum(),
                |w: &[f64]| {
                    w.iter()
                        .map(|x| 2.0 * x / (1.0 + x * x) + 4.0 * x.powi(3))
                        .collect()
                },
            );
            LossFn::custom(Arc::new(o), 10.0, 0.0).unwrap()
        };
        let losses = [
            LossFn::linear(vec![0.3, -2.0, 1.5]).unwrap(),
            LossFn::iso_quadratic(1.7, vec![0.2, -0.4, 0.9], &dom).unwrap(),
            custom,
        ];
        let h = 1e-6;
        for l in &losses {
            for _ in 0..100 {
                let w = dom.sample_uniform(&mut rng);
                let g = l.gradient(&w).unwrap();
                for i in 0..3 {
                    let mut wp = w.clone();
                    let mut wm = w.clone();
                    wp[i] += h;
                    wm[i] -= h;
                    let fd = (l.eval(&wp).unwrap() - l.eval(&wm).unwrap()) / (2.0 * h);
                    assert!((fd - g[i]).abs() < 1e-4, "{fd} vs {}", g[i]);
                }
            }
        }
    }

    #[test]
    fn offline_optimum_examples() {
        // exhaustive over the boundary {-1, 1} of the 1-d box
        let seq = LossSequence::new(
            [1.0, -1.0, 1.0]
                .iter()
                .map(|&g| LossFn::linear(vec![g]).unwrap())
                .collect(),
        )
        .unwrap();
        let best = [-1.0, 1.0]
            .iter()
            .map(|&w| (seq.total(&[w]).unwrap(), w))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap();
        let (w, v) = offline_optimum(&seq, &unit()).unwrap();
        assert_eq!((w[0], v), (best.1, best.0));
        assert_eq!((w[0], v), (-1.0, -1.0));

        let seq = LossSequence::new(vec![
            LossFn::iso_quadratic(1.0, vec![0.2], &unit()).unwrap(),
            LossFn::iso_quadratic(1.0, vec![0.4], &unit()).unwrap(),
        ])
        .unwrap();
        let (w, _) = offline_optimum(&seq, &unit()).unwrap();
        assert!((w[0] - 0.3).abs() < 1e-15);

        let seq = LossSequence::new(vec![LossFn::linear(vec![0.0]).unwrap()]).unwrap();
        assert_eq!(offline_optimum(&seq, &unit()).unwrap(), (vec![0.0], 0.0));

        let shifted = Domain::interval(1.0, 2.0).unwrap();
        assert_eq!(offline_optimum(&seq, &shifted).unwrap().0, vec![1.0]);
    }

    #[test]
    fn offline_optimum_ball_linear_rule() {
        let dom = Domain::ball(vec![0.0, 0.0], 2.0).unwrap();
        let seq = LossSequence::new(vec![
            LossFn::linear(vec![1.0, 0.0]).unwrap(),
            LossFn::linear(vec![2.0, 4.0]).unwrap(),
        ])
        .unwrap();
        let (w, v) = offline_optimum(&seq, &dom).unwrap();
        assert!((w[0] + 1.2).abs() < 1e-15 && (w[1] + 1.6).abs() < 1e-15);
        assert!((v + 10.0).abs() < 1e-12);
    }

    #[test]
    fn offline_optimum_custom_and_mixed() {
        let seq = LossSequence::new(vec![quartic(), LossFn::linear(vec![0.5]).unwrap()]).unwrap();
        // d/dw (w^4 + 0.5 w) = 0  =>  w = -(1/8)^(1/3)
        let (w, _) = offline_optimum(&seq, &unit()).unwrap();
        assert!((w[0] + 0.125f64.cbrt()).abs() < 1e-6);

        let seq = LossSequence::new(vec![
            LossFn::linear(vec![0.5]).unwrap(),
            LossFn::iso_quadratic(2.0, vec![0.25], &unit()).unwrap(),
            LossFn::iso_quadratic(1.0, vec![-0.5], &unit()).unwrap(),
        ])
        .unwrap();
        // (2*0.25 + 1*(-0.5) - 0.5) / 3
        let (w, _) = offline_optimum(&seq, &unit()).unwrap();
        assert!((w[0] + 0.5 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn offline_optimum_not_beaten_by_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dom = Domain::ball(vec![0.5, -0.5], 1.5).unwrap();
        for _ in 0..20 {
            let n = rng.random_range(1..15);
            let losses = (0..n)
                .map(|_| {
                    if rng.random::<bool>() {
                        LossFn::linear(vec![
                            rng.random_range(-1.0..1.0),
                            rng.random_range(-1.0..1.0),
                        ])
                        .unwrap()
                    } else {
                        let c = dom.sample_uniform(&mut rng);
                        LossFn::iso_quadratic(rng.random_range(0.1..2.0), c, &dom).unwrap()
                    }
                })
                .collect();
            let seq = LossSequence::new(losses).unwrap();
            let (_, v) = offline_optimum(&seq, &dom).unwrap();
            for _ in 0..100 {
                let y = dom.sample_uniform(&mut rng);
                assert!(v <= seq.total(&y).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn empty_sequence_rejected() {
        assert_eq!(LossSequence::new(vec![]), Err(Error::EmptySequence));
        let mixed = vec![
            LossFn::linear(vec![1.0]).unwrap(),
            LossFn::linear(vec![1.0, 2.0]).unwrap(),
        ];
        assert!(LossSequence::new(mixed).is_err());
    }

    #[test]
    fn leader_sequence_examples() {
        let seq = LossSequence::new(vec![
            LossFn::iso_quadratic(1.0, vec![0.0], &unit()).unwrap(),
            LossFn::iso_quadratic(1.0, vec![1.0], &unit()).unwrap(),
        ])
        .unwrap();
        assert_eq!(
            leader_sequence(&seq, &unit()).unwrap(),
            vec![vec![0.0], vec![0.5]]
        );

        let one = LossSequence::new(vec![LossFn::linear(vec![0.7]).unwrap()]).unwrap();
        assert_eq!(
            leader_sequence(&one, &unit()).unwrap(),
            vec![offline_optimum(&one, &unit()).unwrap().0]
        );

        // zero prefix total keeps the previous leader
        let seq = LossSequence::new(vec![
            LossFn::linear(vec![1.0]).unwrap(),
            LossFn::linear(vec![-1.0]).unwrap(),
        ])
        .unwrap();
        assert_eq!(
            leader_sequence(&seq, &unit()).unwrap(),
            vec![vec![-1.0], vec![-1.0]]
        );
    }

    #[test]
    fn leader_sequence_custom_matches_closed_form() {
        let dom = unit();
        let quads: Vec<LossFn> = [0.1, 0.9, -0.4]
            .iter()
            .map(|&c| LossFn::iso_quadratic(1.0, vec![c], &dom).unwrap())
            .collect();
        let as_custom: Vec<LossFn> = [0.1, 0.9, -0.4]
            .iter()
            .map(|&c: &f64| {
                let o = FnOracle::new(
                    1,
                    move |w: &[f64]| 0.5 * (w[0] - c).powi(2),
                    move |w: &[f64]| vec![w[0] - c],
                );
                LossFn::custom(Arc::new(o), 2.0, 1.0).unwrap()
            })
            .collect();
        let a = leader_sequence(&LossSequence::new(quads).unwrap(), &dom).unwrap();
        let b = leader_sequence(&LossSequence::new(as_custom).unwrap(), &dom).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x[0] - y[0]).abs() < 1e-8);
        }
    }

    fn random_quadratics(
        rng: &mut ChaCha8Rng,
        dom: &Domain,
        n: usize,
        lambda: f64,
    ) -> LossSequence {
        LossSequence::new(
            (0..n)
                .map(|_| {
                    let c = dom.sample_uniform(rng);
                    LossFn::iso_quadratic(lambda, c, dom).unwrap()
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn follow_the_leader_be_the_leader() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let d = rng.random_range(1..=3);
            let dom = Domain::cube(d, -1.0, 1.0).unwrap();
            let n = rng.random_range(1..=20);
            let lambda = rng.random_range(0.1..3.0);
            let seq = random_quadratics(&mut rng, &dom, n, lambda);
            let leaders = leader_sequence(&seq, &dom).unwrap();
            let last = leaders.last().unwrap();
            let lhs: f64 = seq
                .losses()
                .iter()
                .zip(&leaders)
                .map(|(f, w)| f.eval(w).unwrap())
                .sum();
            let rhs = seq.total(last).unwrap();
            assert!(lhs <= rhs + 1e-9, "{lhs} > {rhs}");
        }
    }

    #[test]
    fn reverse_be_the_leader() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let dom = unit();
        for _ in 0..1000 {
            let n = rng.random_range(1..=40);
            // centers in [-1/2, 1/2] keep |f'| <= 1 on the leaders' hull
            let seq = LossSequence::new(
                (0..n)
                    .map(|_| {
                        LossFn::iso_quadratic_with_lipschitz(
                            1.0,
                            vec![rng.random_range(-0.5..0.5)],
                            1.0,
                        )
                        .unwrap()
                    })
                    .collect(),
            )
            .unwrap();
            let leaders = leader_sequence(&seq, &dom).unwrap();
            let last = leaders.last().unwrap();
            let gap = seq.total(last).unwrap()
                - seq
                    .losses()
                    .iter()
                    .zip(&leaders)
                    .map(|(f, w)| f.eval(w).unwrap())
                    .sum::<f64>();
            let harmonic: f64 = (1..=n).map(|t| 2.0 / t as f64).sum();
            assert!(harmonic - gap >= -1e-9);
        }
    }

    proptest! {
        #[test]
        fn last_leader_is_offline_optimum(seed in any::<u64>(), n in 1usize..25) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dom = Domain::cube(2, -1.0, 1.0).unwrap();
            let losses: Vec<LossFn> = (0..n)
                .map(|_| {
                    if rng.random::<bool>() {
                        LossFn::linear(vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).unwrap()
                    } else {
                        LossFn::iso_quadratic(rng.random_range(0.1..2.0), dom.sample_uniform(&mut rng), &dom).unwrap()
                    }
                })
                .collect();
            let seq = LossSequence::new(losses).unwrap();
            let leaders = leader_sequence(&seq, &dom).unwrap();
            let (w, _) = offline_optimum(&seq, &dom).unwrap();
            prop_assert!(linalg::dist(leaders.last().unwrap(), &w) <= 1e-9);
        }
    }
}
