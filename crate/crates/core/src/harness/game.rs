use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{check_model, AdversaryConfig, AdversaryModel, AlgorithmConfig, Bias, IidKind};
use super::rng::RunStreams;
use super::tuning::{tune, AlgorithmKind, Overrides, TuningInput, TuningPlan};
use crate::adversaries::{
    sectioned_params, AdaptivePusher, Adversary, IidSampler, SectionedBernoulli,
};
use crate::algorithms::{
    BlockedOgd, Ftprll, LazySgd, Ogd, PerturbationSchedule, Player, Regularizer,
};
use crate::error::{check_dim, Error, Result};
use crate::geometry::Domain;
use crate::losses::{
    self, offline_optimum, parse_loss_sequence, peek_dimension, Augment, LossSequence, LossSum,
};

/// Settings shared by every cell of an experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct Environment {
    pub model: AdversaryModel,
    pub domain: Option<Domain>,
    /// Tuning overrides for `G`, `D` and `lambda`.
    pub lipschitz: Option<f64>,
    pub diameter: Option<f64>,
    pub lambda: Option<f64>,
    /// Draws used to estimate the i.i.d. comparator; 0 disables pseudo-regret.
    pub pseudo_regret_samples: usize,
}

impl Default for Environment {
    fn default() -> Self {
        Environment {
            model: AdversaryModel::Oblivious,
            domain: None,
            lipschitz: None,
            diameter: None,
            lambda: None,
            pseudo_regret_samples: super::config::DEFAULT_PSEUDO_REGRET_SAMPLES,
        }
    }
}

/// A validated, tuned game description; [`run_game`] plays it for a seed.
#[derive(Clone, Debug)]
pub struct Scenario {
    algorithm: AlgorithmConfig,
    adversary: AdversaryConfig,
    model: AdversaryModel,
    domain: Domain,
    horizon: usize,
    plan: TuningPlan,
    replay: Option<LossSequence>,
    comparator_estimate: Option<Vec<f64>>,
}

fn unit_interval() -> Domain {
    Domain::interval(-1.0, 1.0).expect("valid interval")
}

fn config_err(e: Error) -> Error {
    match e {
        Error::InvalidParameter(m) => Error::Config(m),
        other => other,
    }
}

impl Scenario {
    /// Validates the pairing, loads replay files, tunes the algorithm and,
    /// for i.i.d. adversaries, estimates the comparator `argmin E f` from
    /// `env.pseudo_regret_samples` draws of a generator seeded by `estimate_seed`.
    pub fn prepare(
        algorithm: &AlgorithmConfig,
        adversary: &AdversaryConfig,
        horizon: usize,
        switches: usize,
        env: &Environment,
        estimate_seed: u64,
    ) -> Result<Self> {
        check_model(adversary, env.model)?;
        if horizon == 0 || switches == 0 {
            return Err(Error::Config("T and S must be positive".into()));
        }

        let mut replay = None;
        let (domain, lipschitz, lambda) = match adversary {
            AdversaryConfig::Iid { sampler, lambda } => {
                let domain = env.domain.clone().unwrap_or_else(unit_interval);
                let s = iid_sampler(*sampler, *lambda, &domain)?;
                (domain, s.lipschitz(), s.strong_convexity())
            }
            AdversaryConfig::Replay { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                let domain = match &env.domain {
                    Some(d) => d.clone(),
                    None => Domain::cube(peek_dimension(&text)?, -1.0, 1.0)?,
                };
                let seq = parse_loss_sequence(&text, Some(&domain))?;
                if seq.len() < horizon {
                    return Err(Error::Config(format!(
                        "replay file has {} losses but T = {horizon}",
                        seq.len()
                    )));
                }
                let out = (domain, seq.max_lipschitz(), seq.min_strong_convexity());
                replay = Some(seq);
                out
            }
            AdversaryConfig::SectionedBernoulli { c, .. } => {
                let domain = fixed_interval(env)?;
                sectioned_params(switches, *c, horizon).map_err(config_err)?;
                (domain, 1.0, 0.0)
            }
            AdversaryConfig::AdaptivePusher => {
                (fixed_interval(env)?, AdaptivePusher::LIPSCHITZ, 1.0)
            }
        };

        let input = TuningInput {
            horizon,
            switches,
            // zero losses still need a positive scale for the tuning formulas
            lipschitz: env
                .lipschitz
                .unwrap_or(if lipschitz > 0.0 { lipschitz } else { 1.0 }),
            diameter: env.diameter.unwrap_or(domain.diameter()),
            lambda: env.lambda.unwrap_or(lambda),
            dimension: domain.dimension(),
        };
        let overrides = Overrides {
            sigma: algorithm.sigma.value(),
            eta: algorithm.eta.value(),
        };
        let plan = tune(algorithm.name, input, algorithm.step, overrides).map_err(config_err)?;

        let comparator_estimate = match adversary {
            AdversaryConfig::Iid { sampler, lambda } if env.pseudo_regret_samples > 0 => {
                let s = iid_sampler(*sampler, *lambda, &domain)?;
                let mut rng = ChaCha8Rng::seed_from_u64(estimate_seed);
                Some(estimate_comparator(
                    &s,
                    &domain,
                    env.pseudo_regret_samples,
                    &mut rng,
                )?)
            }
            _ => None,
        };

        Ok(Scenario {
            algorithm: algorithm.clone(),
            adversary: adversary.clone(),
            model: env.model,
            domain,
            horizon,
            plan,
            replay,
            comparator_estimate,
        })
    }

    pub fn algorithm(&self) -> &AlgorithmConfig {
        &self.algorithm
    }

    pub fn adversary(&self) -> &AdversaryConfig {
        &self.adversary
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn plan(&self) -> &TuningPlan {
        &self.plan
    }

    /// Estimated minimizer of the expected loss (i.i.d. adversaries only).
    pub fn comparator_estimate(&self) -> Option<&[f64]> {
        self.comparator_estimate.as_deref()
    }

    fn build_player(&self, rng: &mut dyn RngCore) -> Result<Box<dyn Player>> {
        let dom = self.domain.clone();
        let p = &self.plan;
        let missing = || Error::Config(format!("tuning plan for {} is incomplete", p.algorithm));
        Ok(match p.algorithm {
            AlgorithmKind::FtprllConvex => {
                let eta = p.eta.ok_or_else(missing)?;
                let reg = Regularizer::quadratic(eta, dom.center())?;
                Box::new(Ftprll::new(dom, p.schedule.ok_or_else(missing)?, reg, rng)?)
            }
            AlgorithmKind::FtprllSc => {
                let sched = p.schedule.ok_or_else(missing)?;
                debug_assert!(matches!(sched, PerturbationSchedule::SqrtScaled(_)));
                Box::new(Ftprll::new(dom, sched, Regularizer::None, rng)?)
            }
            AlgorithmKind::LazySgd => Box::new(LazySgd::new(dom, p.step.ok_or_else(missing)?)?),
            AlgorithmKind::Ogd => Box::new(Ogd::new(dom, p.step.ok_or_else(missing)?)?),
            AlgorithmKind::BlockedOgd => Box::new(BlockedOgd::new(
                dom,
                p.block_length.ok_or_else(missing)?,
                p.step.ok_or_else(missing)?,
            )?),
        })
    }

    fn build_adversary(&self, rng: &mut dyn RngCore) -> Result<Adversary> {
        Ok(match &self.adversary {
            AdversaryConfig::Iid { sampler, lambda } => {
                Adversary::Iid(iid_sampler(*sampler, *lambda, &self.domain)?)
            }
            AdversaryConfig::Replay { .. } => Adversary::Replay(
                self.replay
                    .clone()
                    .ok_or_else(|| Error::Config("replay not loaded".into()))?,
            ),
            AdversaryConfig::SectionedBernoulli { c, bias } => {
                let params = sectioned_params(self.plan.input.switches, *c, self.horizon)?;
                let p = match bias {
                    Bias::Plus => params.p_plus,
                    Bias::Minus => params.p_minus,
                    Bias::Random => {
                        if rng.random_bool(0.5) {
                            params.p_plus
                        } else {
                            params.p_minus
                        }
                    }
                };
                Adversary::SectionedBernoulli(SectionedBernoulli::new(params, p, self.horizon)?)
            }
            AdversaryConfig::AdaptivePusher => {
                Adversary::AdaptivePusher(AdaptivePusher::new(self.horizon)?)
            }
        })
    }
}

fn fixed_interval(env: &Environment) -> Result<Domain> {
    let unit = unit_interval();
    match &env.domain {
        Some(d) if *d != unit => Err(Error::Config(
            "lower-bound adversaries play on the interval [-1, 1]".into(),
        )),
        _ => Ok(unit),
    }
}

fn iid_sampler(kind: IidKind, lambda: f64, domain: &Domain) -> Result<IidSampler> {
    Ok(match kind {
        IidKind::RademacherLinear => IidSampler::RademacherLinear {
            dimension: domain.dimension(),
        },
        IidKind::UniformQuadratic => {
            if !(lambda > 0.0) || !lambda.is_finite() {
                return Err(Error::Config(format!(
                    "quadratic curvature must be positive (got {lambda})"
                )));
            }
            IidSampler::UniformQuadratic {
                lambda,
                domain: domain.clone(),
            }
        }
    })
}

/// Minimizer over `domain` of the empirical mean of `samples` fresh draws.
pub fn estimate_comparator(
    sampler: &IidSampler,
    domain: &Domain,
    samples: usize,
    rng: &mut dyn RngCore,
) -> Result<Vec<f64>> {
    check_dim(domain.dimension(), sampler.dimension())?;
    let mut sum = LossSum::new(domain.dimension());
    for _ in 0..samples {
        sum.add(&sampler.draw(rng)?)?;
    }
    let c = domain.center();
    losses::minimize(&sum, Augment::NONE, domain, &c, &c)
}

/// One played game.
#[derive(Clone, Debug, PartialEq)]
pub struct GameTrace {
    pub decisions: Vec<Vec<f64>>,
    pub loss_values: Vec<f64>,
    /// `switch_flags[t - 1]` is true iff the player switched between rounds
    /// `t` and `t + 1`; `T - 1` entries.
    pub switch_flags: Vec<bool>,
    /// True iff committing the first decision counts as a switch.
    pub initial_switch: bool,
    /// `sum f_t(w_t) - min_w sum f_t(w)`
    pub regret: f64,
    pub switches: usize,
    /// Best fixed decision in hindsight.
    pub hindsight_optimum: Vec<f64>,
    /// `sum f_t(w_t) - sum f_t(w*)` against the estimated `w* = argmin E f`;
    /// an estimate, only for i.i.d. adversaries.
    pub pseudo_regret_estimate: Option<f64>,
    pub seed: u64,
    pub wall_time: Duration,
}

impl GameTrace {
    pub fn total_loss(&self) -> f64 {
        self.loss_values.iter().sum()
    }

    /// Per-round CSV: `t,w_1..w_d,loss,switch`, where `switch` marks a change
    /// into round `t`.
    pub fn to_csv(&self) -> String {
        let d = self.decisions.first().map_or(0, Vec::len);
        let mut out = String::from("t");
        for i in 1..=d {
            write!(out, ",w_{i}").unwrap();
        }
        out.push_str(",loss,switch\n");
        for (i, (w, l)) in self.decisions.iter().zip(&self.loss_values).enumerate() {
            write!(out, "{}", i + 1).unwrap();
            for v in w {
                write!(out, ",{v:.16e}").unwrap();
            }
            let switched = if i == 0 {
                self.initial_switch
            } else {
                self.switch_flags[i - 1]
            };
            writeln!(out, ",{l:.16e},{}", switched as u8).unwrap();
        }
        out
    }
}

/// Plays `scenario` for `scenario.horizon()` rounds.
///
/// Each round the player commits `w_t`; the adversary emits `f_t` (reading
/// `w_t` only if it is adaptive and the model allows it); the player suffers
/// `f_t(w_t)` and observes `f_t`. Player, adversary and estimation draw from
/// separate streams of `seed`, so the trace is a function of
/// `(scenario, seed)` alone.
pub fn run_game(scenario: &Scenario, seed: u64) -> Result<GameTrace> {
    let start = Instant::now();
    let mut streams = RunStreams::new(seed);
    let mut adversary = scenario.build_adversary(&mut streams.adversary)?;
    let mut player = scenario.build_player(&mut streams.player)?;
    let adaptive = adversary.is_adaptive() && scenario.model == AdversaryModel::Adaptive;
    let declared_g = scenario.plan.input.lipschitz;
    let t_max = scenario.horizon;

    let mut decisions = Vec::with_capacity(t_max);
    let mut loss_values = Vec::with_capacity(t_max);
    let mut losses = Vec::with_capacity(t_max);
    let mut switch_flags = Vec::with_capacity(t_max.saturating_sub(1));
    let mut warned = false;
    for t in 1..=t_max {
        let w = player.decision().to_vec();
        let loss =
            adversary.next_loss(t, adaptive.then_some(w.as_slice()), &mut streams.adversary)?;
        if !warned && loss.lipschitz() > declared_g * (1.0 + 1e-9) {
            log::warn!(
                "round {t}: loss Lipschitz bound {} exceeds the tuning value {declared_g}",
                loss.lipschitz()
            );
            warned = true;
        }
        loss_values.push(loss.eval(&w)?);
        let switched = player.observe(&loss, &mut streams.player)?;
        if t < t_max {
            switch_flags.push(switched);
        }
        decisions.push(w);
        losses.push(loss);
    }

    let seq = LossSequence::new(losses)?;
    let (hindsight_optimum, best) = offline_optimum(&seq, &scenario.domain)?;
    let total: f64 = loss_values.iter().sum();
    let pseudo_regret_estimate = match &scenario.comparator_estimate {
        Some(w) => Some(total - seq.total(w)?),
        None => None,
    };
    let initial_switch = player.initial_switch();
    let switches = switch_flags.iter().filter(|f| **f).count() + initial_switch as usize;
    Ok(GameTrace {
        decisions,
        loss_values,
        switch_flags,
        initial_switch,
        regret: total - best,
        switches,
        hindsight_optimum,
        pseudo_regret_estimate,
        seed,
        wall_time: start.elapsed(),
    })
}
