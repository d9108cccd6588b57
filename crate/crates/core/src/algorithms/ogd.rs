use rand::RngCore;

use super::{Player, StepRule, SWITCH_TOLERANCE};
use crate::error::{check_dim, Error, Result};
use crate::geometry::Domain;
use crate::linalg;
use crate::losses::LossFn;

/// Moves to `candidate` only if it is more than [`SWITCH_TOLERANCE`] away.
fn commit(current: &mut Vec<f64>, candidate: Vec<f64>) -> bool {
    if linalg::dist(current, &candidate) > SWITCH_TOLERANCE {
        *current = candidate;
        true
    } else {
        false
    }
}

/// Projected online gradient descent, `w_{t+1} = project(w_t - eta_t grad f_t(w_t))`.
#[derive(Clone, Debug)]
pub struct Ogd {
    domain: Domain,
    step: StepRule,
    decision: Vec<f64>,
    round: usize,
}

impl Ogd {
    /// Starts at the domain center.
    pub fn new(domain: Domain, step: StepRule) -> Result<Self> {
        let start = domain.center();
        Self::starting_at(domain, step, start)
    }

    pub fn starting_at(domain: Domain, step: StepRule, start: Vec<f64>) -> Result<Self> {
        step.validate()?;
        check_dim(domain.dimension(), start.len())?;
        let decision = domain.project(&start)?;
        Ok(Ogd {
            domain,
            step,
            decision,
            round: 1,
        })
    }
}

impl Player for Ogd {
    fn decision(&self) -> &[f64] {
        &self.decision
    }

    fn observe(&mut self, loss: &LossFn, _rng: &mut dyn RngCore) -> Result<bool> {
        let g = loss.gradient(&self.decision)?;
        let mut x = self.decision.clone();
        linalg::axpy(-self.step.eta(self.round), &g, &mut x);
        let next = self.domain.project(&x)?;
        self.round += 1;
        Ok(commit(&mut self.decision, next))
    }
}

/// OGD over blocks of equal length: the decision is held for a whole block,
/// gradients are summed over it, and one projected step is taken at the
/// block end. The step rule is indexed by block, not by round.
#[derive(Clone, Debug)]
pub struct BlockedOgd {
    domain: Domain,
    step: StepRule,
    block_length: usize,
    decision: Vec<f64>,
    gradient_sum: Vec<f64>,
    round: usize,
}

impl BlockedOgd {
    /// `ceil(T / S)`, the block length giving at most `S` blocks.
    pub fn block_length(horizon: usize, switches: usize) -> Result<usize> {
        if horizon == 0 || switches == 0 {
            return Err(Error::InvalidParameter(
                "horizon and switch budget must be positive".into(),
            ));
        }
        Ok(horizon.div_ceil(switches))
    }

    /// Starts at the domain center.
    pub fn new(domain: Domain, block_length: usize, step: StepRule) -> Result<Self> {
        step.validate()?;
        if block_length == 0 {
            return Err(Error::InvalidParameter(
                "block length must be positive".into(),
            ));
        }
        let decision = domain.center();
        Ok(BlockedOgd {
            gradient_sum: vec![0.0; domain.dimension()],
            domain,
            step,
            block_length,
            decision,
            round: 1,
        })
    }

    pub fn block_len(&self) -> usize {
        self.block_length
    }
}

impl Player for BlockedOgd {
    fn decision(&self) -> &[f64] {
        &self.decision
    }

    fn observe(&mut self, loss: &LossFn, _rng: &mut dyn RngCore) -> Result<bool> {
        let g = loss.gradient(&self.decision)?;
        linalg::axpy(1.0, &g, &mut self.gradient_sum);
        let t = self.round;
        self.round += 1;
        if !t.is_multiple_of(self.block_length) {
            return Ok(false);
        }
        let k = t / self.block_length;
        let mut x = self.decision.clone();
        linalg::axpy(-self.step.eta(k), &self.gradient_sum, &mut x);
        self.gradient_sum.iter_mut().for_each(|v| *v = 0.0);
        let next = self.domain.project(&x)?;
        Ok(commit(&mut self.decision, next))
    }
}
