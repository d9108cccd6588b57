//! Online players.
//!
//! Every player exposes the decision it commits to for the current round
//! and then observes that round's loss. [`Player::observe`] reports whether
//! the decision for the next round is a switch.

use std::fmt;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::losses::LossFn;

mod ftprll;
mod lazy_sgd;
mod objective;
mod ogd;

pub use ftprll::Ftprll;
pub use lazy_sgd::LazySgd;
pub use objective::{argmin_objective, CumulativeObjective, PerturbationSchedule, Regularizer};
pub use ogd::{BlockedOgd, Ogd};

/// Movement below this Euclidean norm is not a switch for gradient players.
pub const SWITCH_TOLERANCE: f64 = 1e-12;

pub trait Player: Send + fmt::Debug {
    /// Decision committed for the current round.
    fn decision(&self) -> &[f64];

    /// Observe the current round's loss and move to the next round. Returns
    /// true iff the next decision is a switch.
    fn observe(&mut self, loss: &LossFn, rng: &mut dyn RngCore) -> Result<bool>;

    /// Whether committing the very first decision counts as a switch.
    fn initial_switch(&self) -> bool {
        false
    }
}

/// Step size `eta_t` for gradient players.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepRule {
    Constant(f64),
    /// `eta_t = scale / sqrt(t)`
    InvSqrt {
        scale: f64,
    },
    /// `eta_t = 1 / (lambda t)`
    InvLinear {
        lambda: f64,
    },
}

impl StepRule {
    /// `eta_t = D / (G sqrt(t))` for `G`-Lipschitz losses on a set of diameter `D`.
    pub fn general(diameter: f64, lipschitz: f64) -> Result<Self> {
        let rule = StepRule::InvSqrt {
            scale: diameter / lipschitz,
        };
        rule.validate()?;
        Ok(rule)
    }

    /// `eta_t = 1 / (lambda t)` for `lambda`-strongly convex losses.
    pub fn strongly_convex(lambda: f64) -> Result<Self> {
        let rule = StepRule::InvLinear { lambda };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        let v = match self {
            StepRule::Constant(eta) => *eta,
            StepRule::InvSqrt { scale } => *scale,
            StepRule::InvLinear { lambda } => *lambda,
        };
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "step size parameter must be positive and finite (got {v})"
            )));
        }
        Ok(())
    }

    /// `eta_t` for a 1-based round `t`.
    pub fn eta(&self, t: usize) -> f64 {
        let t = t as f64;
        match self {
            StepRule::Constant(eta) => *eta,
            StepRule::InvSqrt { scale } => scale / t.sqrt(),
            StepRule::InvLinear { lambda } => 1.0 / (lambda * t),
        }
    }
}
