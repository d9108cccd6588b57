//! Loss generators: i.i.d. samplers, fixed replays, and two lower-bound
//! constructions (sectioned Bernoulli signs and an adaptive leader pusher).

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::error::{check_dim, Error, Result};
use crate::geometry::Domain;
use crate::losses::{LossFn, LossSequence};

/// User-supplied i.i.d. loss distribution.
pub trait LossDraw: Send + Sync + fmt::Debug {
    fn dimension(&self) -> usize;
    /// Declared Lipschitz bound of every draw.
    fn lipschitz(&self) -> f64;
    fn draw(&self, rng: &mut dyn RngCore) -> Result<LossFn>;
}

/// Distribution of i.i.d. losses.
#[derive(Clone, Debug)]
pub enum IidSampler {
    /// Linear losses with independent `+-1/sqrt(d)` coordinates, so `|g| = 1`.
    RademacherLinear {
        dimension: usize,
    },
    /// `(lambda/2)|w - c|^2` with `c` uniform on `domain`; `G = lambda D`.
    UniformQuadratic {
        lambda: f64,
        domain: Domain,
    },
    Custom(Arc<dyn LossDraw>),
}

impl IidSampler {
    pub fn dimension(&self) -> usize {
        match self {
            IidSampler::RademacherLinear { dimension } => *dimension,
            IidSampler::UniformQuadratic { domain, .. } => domain.dimension(),
            IidSampler::Custom(s) => s.dimension(),
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match self {
            IidSampler::RademacherLinear { .. } => 1.0,
            IidSampler::UniformQuadratic { lambda, domain } => lambda * domain.diameter(),
            IidSampler::Custom(s) => s.lipschitz(),
        }
    }

    /// Strong convexity shared by every draw (0 when not known to be positive).
    pub fn strong_convexity(&self) -> f64 {
        match self {
            IidSampler::UniformQuadratic { lambda, .. } => *lambda,
            _ => 0.0,
        }
    }

    pub fn draw(&self, rng: &mut dyn RngCore) -> Result<LossFn> {
        match self {
            IidSampler::RademacherLinear { dimension } => {
                if *dimension == 0 {
                    return Err(Error::InvalidParameter("dimension must be positive".into()));
                }
                let a = 1.0 / (*dimension as f64).sqrt();
                let g = (0..*dimension)
                    .map(|_| if rng.random_bool(0.5) { a } else { -a })
                    .collect();
                LossFn::linear(g)?.with_lipschitz(1.0)
            }
            IidSampler::UniformQuadratic { lambda, domain } => {
                let c = domain.sample_uniform(rng);
                LossFn::iso_quadratic_with_lipschitz(*lambda, c, lambda * domain.diameter())
            }
            IidSampler::Custom(s) => s.draw(rng),
        }
    }
}

/// Parameters of the sectioned Bernoulli construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectionedParams {
    /// `J = C^2 S^2`
    pub sections: usize,
    /// `tau = floor(T / J)`; the last section also takes the remainder.
    pub section_length: usize,
    /// `epsilon = 1 / (8 C S)`
    pub epsilon: f64,
    pub p_plus: f64,
    pub p_minus: f64,
}

pub fn sectioned_params(switches: usize, c: usize, horizon: usize) -> Result<SectionedParams> {
    if switches == 0 || c == 0 {
        return Err(Error::InvalidParameter("S and C must be positive".into()));
    }
    let cs = c
        .checked_mul(switches)
        .ok_or_else(|| Error::InvalidParameter("C S overflows".into()))?;
    let sections = cs
        .checked_mul(cs)
        .ok_or_else(|| Error::InvalidParameter("C^2 S^2 overflows".into()))?;
    if horizon < sections {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} is shorter than the {sections} sections"
        )));
    }
    let epsilon = 1.0 / (8.0 * cs as f64);
    Ok(SectionedParams {
        sections,
        section_length: horizon / sections,
        epsilon,
        p_plus: (1.0 + epsilon) / 2.0,
        p_minus: (1.0 - epsilon) / 2.0,
    })
}

/// Linear losses `b_j w` on `[-1, 1]` that stay fixed over each section,
/// with `b_j = +1` drawn with probability `p`.
#[derive(Clone, Debug)]
pub struct SectionedBernoulli {
    params: SectionedParams,
    p: f64,
    horizon: usize,
    current: Option<(usize, f64)>,
    sections_drawn: usize,
}

impl SectionedBernoulli {
    pub fn new(params: SectionedParams, p: f64, horizon: usize) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "p must lie in (0, 1) (got {p})"
            )));
        }
        if params.sections == 0 || params.section_length == 0 || horizon < params.sections {
            return Err(Error::InvalidParameter(
                "inconsistent section parameters".into(),
            ));
        }
        Ok(SectionedBernoulli {
            params,
            p,
            horizon,
            current: None,
            sections_drawn: 0,
        })
    }

    pub fn params(&self) -> &SectionedParams {
        &self.params
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// 0-based section of a 1-based round.
    pub fn section_of(&self, t: usize) -> usize {
        ((t - 1) / self.params.section_length).min(self.params.sections - 1)
    }

    /// Number of section signs drawn so far.
    pub fn sections_drawn(&self) -> usize {
        self.sections_drawn
    }

    fn next_loss(&mut self, t: usize, rng: &mut dyn RngCore) -> Result<LossFn> {
        if t == 0 || t > self.horizon {
            return Err(Error::InvalidParameter(format!(
                "round {t} outside 1..={}",
                self.horizon
            )));
        }
        let j = self.section_of(t);
        let b = match self.current {
            Some((section, b)) if section == j => b,
            _ => {
                let b = if rng.random_bool(self.p) { 1.0 } else { -1.0 };
                self.current = Some((j, b));
                self.sections_drawn += 1;
                b
            }
        };
        LossFn::linear(vec![b])
    }
}

/// Adaptive adversary on `[-1, 1]` pushing the running leader away from the
/// player's decision with `(1/2)(w - x_t)^2` losses.
///
/// The first `ceil(T/2)` rounds place `x_t` on the leader. Afterwards
/// `x_t = w* + t/(2T)` if the player's decision is at most the leader and
/// `w* - t/(2T)` otherwise, which moves the leader by `+-1/(2T)` away from
/// the player.
#[derive(Clone, Debug)]
pub struct AdaptivePusher {
    horizon: usize,
    leader: f64,
    warmup: usize,
}

impl AdaptivePusher {
    /// Declared Lipschitz bound: `|w - x| <= 2` on `[-1, 1]`.
    pub const LIPSCHITZ: f64 = 2.0;

    pub fn new(horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be positive".into()));
        }
        Ok(AdaptivePusher {
            horizon,
            leader: 0.0,
            warmup: horizon.div_ceil(2),
        })
    }

    /// Starts after warm-up with a given leader.
    pub fn with_leader(horizon: usize, leader: f64) -> Result<Self> {
        let mut a = Self::new(horizon)?;
        a.leader = leader;
        Ok(a)
    }

    pub fn leader(&self) -> f64 {
        self.leader
    }

    pub fn warmup(&self) -> usize {
        self.warmup
    }

    pub fn domain() -> Domain {
        Domain::interval(-1.0, 1.0).expect("valid interval")
    }

    fn next_loss(&mut self, t: usize, decision: &[f64]) -> Result<LossFn> {
        check_dim(1, decision.len())?;
        let x = if t <= self.warmup {
            self.leader
        } else {
            let big_t = self.horizon as f64;
            let offset = t as f64 / (2.0 * big_t);
            if decision[0] <= self.leader {
                let x = self.leader + offset;
                self.leader += 1.0 / (2.0 * big_t);
                x
            } else {
                let x = self.leader - offset;
                self.leader -= 1.0 / (2.0 * big_t);
                x
            }
        };
        LossFn::iso_quadratic_with_lipschitz(1.0, vec![x], Self::LIPSCHITZ)
    }
}

#[derive(Clone, Debug)]
pub enum Adversary {
    Iid(IidSampler),
    Replay(LossSequence),
    SectionedBernoulli(SectionedBernoulli),
    AdaptivePusher(AdaptivePusher),
}

impl Adversary {
    /// Whether the adversary reads the player's decision.
    pub fn is_adaptive(&self) -> bool {
        matches!(self, Adversary::AdaptivePusher(_))
    }

    pub fn dimension(&self) -> usize {
        match self {
            Adversary::Iid(s) => s.dimension(),
            Adversary::Replay(seq) => seq.dimension(),
            Adversary::SectionedBernoulli(_) | Adversary::AdaptivePusher(_) => 1,
        }
    }

    /// Declared Lipschitz bound of every emitted loss.
    pub fn lipschitz(&self) -> f64 {
        match self {
            Adversary::Iid(s) => s.lipschitz(),
            Adversary::Replay(seq) => seq.max_lipschitz(),
            Adversary::SectionedBernoulli(_) => 1.0,
            Adversary::AdaptivePusher(_) => AdaptivePusher::LIPSCHITZ,
        }
    }

    /// Strong convexity shared by every emitted loss.
    pub fn strong_convexity(&self) -> f64 {
        match self {
            Adversary::Iid(s) => s.strong_convexity(),
            Adversary::Replay(seq) => seq.min_strong_convexity(),
            Adversary::SectionedBernoulli(_) => 0.0,
            Adversary::AdaptivePusher(_) => 1.0,
        }
    }

    /// Loss for 1-based round `t`. `last_decision` is the decision the
    /// player committed for round `t`; only adaptive adversaries read it.
    pub fn next_loss(
        &mut self,
        t: usize,
        last_decision: Option<&[f64]>,
        rng: &mut dyn RngCore,
    ) -> Result<LossFn> {
        match self {
            Adversary::Iid(s) => s.draw(rng),
            Adversary::Replay(seq) => t
                .checked_sub(1)
                .and_then(|i| seq.get(i))
                .cloned()
                .ok_or(Error::ReplayExhausted { round: t }),
            Adversary::SectionedBernoulli(s) => s.next_loss(t, rng),
            Adversary::AdaptivePusher(a) => {
                let w = last_decision.ok_or(Error::MissingDecision { round: t })?;
                a.next_loss(t, w)
            }
        }
    }
}
