use rand::RngCore;

use super::objective::{CumulativeObjective, PerturbationSchedule, Regularizer};
use super::Player;
use crate::coupling::{lazy_sample, CoupledSample, DensityDist, GaussianSpec};
use crate::error::{check_dim, Error, Result};
use crate::geometry::Domain;
use crate::linalg;
use crate::losses::LossFn;

/// Follow the perturbed regularized lazy leader.
///
/// Each round minimizes the cumulative loss plus a Gaussian linear
/// perturbation `p_t` and a regularizer. After observing `f_t` the shifted
/// perturbation `p_t - grad f_t(w_t)` is coupled to a fresh `N(0, sigma_{t+1}^2)`
/// draw; when the coupling keeps it, `w_t` already minimizes the next
/// objective and is reused as is. Only a resample triggers a new solve.
#[derive(Clone, Debug)]
pub struct Ftprll {
    domain: Domain,
    schedule: PerturbationSchedule,
    objective: CumulativeObjective,
    decision: Vec<f64>,
    round: usize,
}

impl Ftprll {
    /// Draws `p_1 ~ N(0, sigma_1^2 I)` and commits `w_1`.
    pub fn new(
        domain: Domain,
        schedule: PerturbationSchedule,
        regularizer: Regularizer,
        rng: &mut dyn RngCore,
    ) -> Result<Self> {
        schedule.validate()?;
        let p1 = GaussianSpec::centered(domain.dimension(), schedule.sigma(1))?.sample(rng);
        Self::with_perturbation(domain, schedule, regularizer, p1)
    }

    /// Starts from a given first perturbation.
    ///
    /// With a quadratic regularizer `w_1 = project(w0 - eta p_1)`. Without one
    /// the first objective is linear and `w_1` is the domain point minimizing
    /// `p_1·w`, with `p_1 = 0` mapped to the domain center.
    pub fn with_perturbation(
        domain: Domain,
        schedule: PerturbationSchedule,
        regularizer: Regularizer,
        p1: Vec<f64>,
    ) -> Result<Self> {
        schedule.validate()?;
        regularizer.validate(&domain)?;
        check_dim(domain.dimension(), p1.len())?;
        let objective = CumulativeObjective::new(p1, schedule.sigma(1), regularizer)?;
        let decision = match objective.regularizer() {
            Regularizer::None => {
                domain.linear_minimizer(objective.perturbation(), &domain.center())?
            }
            Regularizer::Quadratic { anchor, .. } => objective.argmin_from(&domain, anchor)?,
        };
        Ok(Ftprll {
            domain,
            schedule,
            objective,
            decision,
            round: 1,
        })
    }

    /// Current 1-based round.
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn objective(&self) -> &CumulativeObjective {
        &self.objective
    }

    pub fn schedule(&self) -> PerturbationSchedule {
        self.schedule
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Completes the current round with an externally produced coupling
    /// outcome for `p_{t+1}`. [`Player::observe`] calls this with the output
    /// of [`lazy_sample`].
    pub fn advance(&mut self, loss: &LossFn, coupled: CoupledSample) -> Result<bool> {
        check_dim(self.domain.dimension(), loss.dimension())?;
        check_dim(self.domain.dimension(), coupled.value.len())?;
        self.objective.add_loss(loss)?;
        let modulus = self.objective.modulus();
        if !(modulus > 0.0) {
            return Err(Error::Config(format!(
                "objective after round {} is not strongly convex (modulus {modulus}); \
                 the regularizer-free tuning needs losses with positive strong convexity",
                self.round
            )));
        }
        let next = self.round + 1;
        self.objective
            .set_perturbation(coupled.value, self.schedule.sigma(next))?;
        if coupled.resampled {
            self.decision = self.objective.argmin_from(&self.domain, &self.decision)?;
        }
        self.round = next;
        Ok(coupled.resampled)
    }
}

impl Player for Ftprll {
    fn decision(&self) -> &[f64] {
        &self.decision
    }

    fn observe(&mut self, loss: &LossFn, rng: &mut dyn RngCore) -> Result<bool> {
        let g = loss.gradient(&self.decision)?;
        let mut x = self.objective.perturbation().to_vec();
        linalg::axpy(-1.0, &g, &mut x);
        let q = GaussianSpec::new(linalg::scale(&g, -1.0), self.schedule.sigma(self.round))?;
        let p = GaussianSpec::centered(g.len(), self.schedule.sigma(self.round + 1))?;
        let coupled = lazy_sample(&x, &q, &p, rng)?;
        self.advance(loss, coupled)
    }
}
