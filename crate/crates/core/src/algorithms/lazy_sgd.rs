use rand::RngCore;

use super::{Player, StepRule};
use crate::error::{check_dim, Result};
use crate::geometry::Domain;
use crate::linalg;
use crate::losses::LossFn;

/// Projected SGD whose average iterate is published only at rounds
/// `t = 1, 2, 4, 8, ...`, so `T` rounds see `floor(log2 T) + 1` switches
/// (the first publication included).
#[derive(Clone, Debug)]
pub struct LazySgd {
    domain: Domain,
    step: StepRule,
    inner: Vec<f64>,
    inner_sum: Vec<f64>,
    published: Vec<f64>,
    block: u32,
    round: usize,
}

impl LazySgd {
    /// Starts the inner iterate at the domain center.
    pub fn new(domain: Domain, step: StepRule) -> Result<Self> {
        let start = domain.center();
        Self::starting_at(domain, step, start)
    }

    pub fn starting_at(domain: Domain, step: StepRule, start: Vec<f64>) -> Result<Self> {
        step.validate()?;
        check_dim(domain.dimension(), start.len())?;
        let x1 = domain.project(&start)?;
        let published = domain.project(&x1)?;
        Ok(LazySgd {
            domain,
            step,
            inner_sum: x1.clone(),
            inner: x1,
            published,
            block: 1,
            round: 1,
        })
    }

    /// Current 1-based round.
    pub fn round(&self) -> usize {
        self.round
    }

    /// Number of publications so far.
    pub fn block(&self) -> u32 {
        self.block
    }

    /// Inner iterate `x_t`.
    pub fn inner(&self) -> &[f64] {
        &self.inner
    }
}

impl Player for LazySgd {
    fn decision(&self) -> &[f64] {
        &self.published
    }

    fn observe(&mut self, loss: &LossFn, _rng: &mut dyn RngCore) -> Result<bool> {
        let g = loss.gradient(&self.inner)?;
        let eta = self.step.eta(self.round);
        let mut x = self.inner.clone();
        linalg::axpy(-eta, &g, &mut x);
        self.inner = self.domain.project(&x)?;
        linalg::axpy(1.0, &self.inner, &mut self.inner_sum);
        self.round += 1;
        if self.round.is_power_of_two() {
            self.block += 1;
            let avg = linalg::scale(&self.inner_sum, 1.0 / self.round as f64);
            self.published = self.domain.project(&avg)?;
            return Ok(true);
        }
        Ok(false)
    }

    fn initial_switch(&self) -> bool {
        true
    }
}
