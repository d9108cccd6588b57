use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algorithms::{BlockedOgd, PerturbationSchedule, StepRule};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmKind {
    FtprllConvex,
    FtprllSc,
    LazySgd,
    Ogd,
    BlockedOgd,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 5] = [
        AlgorithmKind::FtprllConvex,
        AlgorithmKind::FtprllSc,
        AlgorithmKind::LazySgd,
        AlgorithmKind::Ogd,
        AlgorithmKind::BlockedOgd,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmKind::FtprllConvex => "ftprll-convex",
            AlgorithmKind::FtprllSc => "ftprll-sc",
            AlgorithmKind::LazySgd => "lazy-sgd",
            AlgorithmKind::Ogd => "ogd",
            AlgorithmKind::BlockedOgd => "blocked-ogd",
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AlgorithmKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm {s:?}")))
    }
}

/// Which step-size rule gradient players use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepChoice {
    /// Strongly convex when `lambda > 0`, general otherwise.
    #[default]
    Auto,
    Convex,
    StronglyConvex,
}

impl FromStr for StepChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(StepChoice::Auto),
            "convex" => Ok(StepChoice::Convex),
            "strongly-convex" => Ok(StepChoice::StronglyConvex),
            _ => Err(Error::InvalidParameter(format!("unknown step rule {s:?}"))),
        }
    }
}

/// Problem constants a plan is derived from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuningInput {
    pub horizon: usize,
    pub switches: usize,
    pub lipschitz: f64,
    pub diameter: f64,
    pub lambda: f64,
    pub dimension: usize,
}

/// Manual parameter overrides; they take precedence over tuned values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    pub sigma: Option<f64>,
    pub eta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TuningPlan {
    pub algorithm: AlgorithmKind,
    pub input: TuningInput,
    /// Base perturbation scale (FTPRLL only).
    pub sigma: Option<f64>,
    /// Value the tuning formula gives for `sigma`, before overrides.
    pub tuned_sigma: Option<f64>,
    pub schedule: Option<PerturbationSchedule>,
    /// Regularization rate (FTPRLL convex only).
    pub eta: Option<f64>,
    pub tuned_eta: Option<f64>,
    /// Step-size rule for gradient players.
    pub step: Option<StepRule>,
    pub block_length: Option<usize>,
    pub bound_regret: f64,
    pub bound_switches: f64,
}

fn check_input(input: &TuningInput) -> Result<()> {
    if input.horizon == 0 || input.switches == 0 || input.dimension == 0 {
        return Err(Error::InvalidParameter(
            "T, S and d must be positive".into(),
        ));
    }
    for (name, v) in [("G", input.lipschitz), ("D", input.diameter)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "{name} must be positive and finite (got {v})"
            )));
        }
    }
    if !(input.lambda >= 0.0) || !input.lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "lambda must be >= 0 (got {})",
            input.lambda
        )));
    }
    Ok(())
}

fn positive_override(name: &str, v: Option<f64>) -> Result<Option<f64>> {
    match v {
        Some(x) if !(x > 0.0) || !x.is_finite() => Err(Error::InvalidParameter(format!(
            "{name} override must be positive and finite (got {x})"
        ))),
        _ => Ok(v),
    }
}

fn require_lambda(input: &TuningInput, what: &str) -> Result<f64> {
    if input.lambda > 0.0 {
        Ok(input.lambda)
    } else {
        Err(Error::InvalidParameter(format!("{what} needs lambda > 0")))
    }
}

fn wants_strong(choice: StepChoice, input: &TuningInput) -> bool {
    match choice {
        StepChoice::Auto => input.lambda > 0.0,
        StepChoice::Convex => false,
        StepChoice::StronglyConvex => true,
    }
}

/// Derives algorithm parameters from `(T, S, G, D, lambda, d)` and
/// annotates the plan with the matching regret and switch bounds.
///
/// * `ftprll-convex`: `sigma = G T / (2S)`, `eta = D / (2 G sqrt T)`;
///   regret `2 eta G^2 T + D^2/(2 eta) + sigma sqrt(d) D`, switches `G T / (2 sigma)`.
/// * `ftprll-sc`: `sigma_t = sqrt(t) G sqrt(T) / S`;
///   regret `(2G^2 + 2 d sigma^2)(1 + ln T)/lambda`, switches `G sqrt(T) / sigma`.
/// * `lazy-sgd`: `eta_t = D/(G sqrt t)` with pseudo-regret `2 D G sqrt(T)(1 + ln T)`,
///   or `eta_t = 1/(lambda t)` with `(G^2/lambda)(1 + ln T)^2`; switches `floor(log2 T) + 1`.
/// * `ogd`: `1.5 D G sqrt(T)` or `G^2 (1 + ln T) / (2 lambda)`; switches `T - 1`.
/// * `blocked-ogd`: OGD on `K = ceil(T/B)` blocks of `B = ceil(T/S)` rounds whose
///   aggregated losses are `B G`-Lipschitz and `B lambda`-strongly convex:
///   `1.5 D B G sqrt(K)` or `B G^2 (1 + ln K) / (2 lambda)`; switches `K - 1`.
///
/// Overrides replace the tuned `sigma`/`eta`; bounds are evaluated at the
/// parameters actually used. For gradient players an `eta` override is a
/// constant step and the bounds keep the tuned-rule values for reference.
pub fn tune(
    algorithm: AlgorithmKind,
    input: TuningInput,
    step_choice: StepChoice,
    overrides: Overrides,
) -> Result<TuningPlan> {
    check_input(&input)?;
    let sigma_override = positive_override("sigma", overrides.sigma)?;
    let eta_override = positive_override("eta", overrides.eta)?;
    let t = input.horizon as f64;
    let s = input.switches as f64;
    let (g, dd, d) = (input.lipschitz, input.diameter, input.dimension as f64);
    let log_t = 1.0 + t.ln();

    let mut plan = TuningPlan {
        algorithm,
        input,
        sigma: None,
        tuned_sigma: None,
        schedule: None,
        eta: None,
        tuned_eta: None,
        step: None,
        block_length: None,
        bound_regret: 0.0,
        bound_switches: 0.0,
    };

    match algorithm {
        AlgorithmKind::FtprllConvex => {
            let tuned_sigma = g * t / (2.0 * s);
            let tuned_eta = dd / (2.0 * g * t.sqrt());
            let sigma = sigma_override.unwrap_or(tuned_sigma);
            let eta = eta_override.unwrap_or(tuned_eta);
            plan.tuned_sigma = Some(tuned_sigma);
            plan.tuned_eta = Some(tuned_eta);
            plan.sigma = Some(sigma);
            plan.eta = Some(eta);
            plan.schedule = Some(PerturbationSchedule::Constant(sigma));
            plan.bound_regret =
                2.0 * eta * g * g * t + dd * dd / (2.0 * eta) + sigma * d.sqrt() * dd;
            plan.bound_switches = g * t / (2.0 * sigma);
        }
        AlgorithmKind::FtprllSc => {
            let lambda = require_lambda(&input, "ftprll-sc")?;
            let tuned_sigma = g * t.sqrt() / s;
            let sigma = sigma_override.unwrap_or(tuned_sigma);
            plan.tuned_sigma = Some(tuned_sigma);
            plan.sigma = Some(sigma);
            plan.schedule = Some(PerturbationSchedule::SqrtScaled(sigma));
            plan.bound_regret = (2.0 * g * g + 2.0 * d * sigma * sigma) * log_t / lambda;
            plan.bound_switches = g * t.sqrt() / sigma;
        }
        AlgorithmKind::LazySgd => {
            let step = if wants_strong(step_choice, &input) {
                let lambda = require_lambda(&input, "the strongly convex step rule")?;
                plan.bound_regret = g * g / lambda * log_t * log_t;
                StepRule::strongly_convex(lambda)?
            } else {
                plan.bound_regret = 2.0 * dd * g * t.sqrt() * log_t;
                StepRule::general(dd, g)?
            };
            plan.step = Some(eta_override.map_or(step, StepRule::Constant));
            plan.bound_switches = (input.horizon.ilog2() + 1) as f64;
        }
        AlgorithmKind::Ogd => {
            let step = if wants_strong(step_choice, &input) {
                let lambda = require_lambda(&input, "the strongly convex step rule")?;
                plan.bound_regret = g * g * log_t / (2.0 * lambda);
                StepRule::strongly_convex(lambda)?
            } else {
                plan.bound_regret = 1.5 * dd * g * t.sqrt();
                StepRule::general(dd, g)?
            };
            plan.step = Some(eta_override.map_or(step, StepRule::Constant));
            plan.bound_switches = t - 1.0;
        }
        AlgorithmKind::BlockedOgd => {
            let b = BlockedOgd::block_length(input.horizon, input.switches)?;
            let k = input.horizon.div_ceil(b) as f64;
            let bf = b as f64;
            let step = if wants_strong(step_choice, &input) {
                let lambda = require_lambda(&input, "the strongly convex step rule")?;
                plan.bound_regret = bf * g * g * (1.0 + k.ln()) / (2.0 * lambda);
                StepRule::strongly_convex(lambda * bf)?
            } else {
                plan.bound_regret = 1.5 * dd * bf * g * k.sqrt();
                StepRule::general(dd, bf * g)?
            };
            plan.step = Some(eta_override.map_or(step, StepRule::Constant));
            plan.block_length = Some(b);
            plan.bound_switches = k - 1.0;
        }
    }
    Ok(plan)
}
