//! JSON run configuration.
//!
//! ```json
//! {
//!   "algorithm": ["ftprll-convex", {"name": "ogd", "eta": 0.1}],
//!   "adversary": {"kind": "iid", "sampler": "rademacher-linear"},
//!   "T": 1024,
//!   "S": [16, 32],
//!   "seeds": 50,
//!   "seed": 7,
//!   "output": "results.csv"
//! }
//! ```
//!
//! `algorithm`, `adversary`, `T` and `S` accept a single value or a list;
//! a list expands into a grid. Adaptive adversaries are rejected unless
//! `"adversary_model": "adaptive"` is set.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

use super::tuning::{AlgorithmKind, StepChoice};
use crate::error::{Error, Result};
use crate::geometry::Domain;

/// A tuning parameter: `"auto"` or a number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Value(f64),
    Keyword(Auto),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Auto {
    #[default]
    Auto,
}

impl Default for Param {
    fn default() -> Self {
        Param::Keyword(Auto::Auto)
    }
}

impl Param {
    pub fn value(&self) -> Option<f64> {
        match self {
            Param::Value(v) => Some(*v),
            Param::Keyword(_) => None,
        }
    }

    pub fn is_auto(&self) -> bool {
        matches!(self, Param::Keyword(_))
    }
}

impl From<Option<f64>> for Param {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Param::default(), Param::Value)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "AlgorithmRepr")]
pub struct AlgorithmConfig {
    pub name: AlgorithmKind,
    #[serde(default, skip_serializing_if = "Param::is_auto")]
    pub sigma: Param,
    #[serde(default, skip_serializing_if = "Param::is_auto")]
    pub eta: Param,
    #[serde(default)]
    pub step: StepChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AlgorithmRepr {
    Name(AlgorithmKind),
    Full(AlgorithmFields),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgorithmFields {
    name: AlgorithmKind,
    #[serde(default)]
    sigma: Param,
    #[serde(default)]
    eta: Param,
    #[serde(default)]
    step: StepChoice,
    #[serde(default)]
    label: Option<String>,
}

impl From<AlgorithmRepr> for AlgorithmConfig {
    fn from(r: AlgorithmRepr) -> Self {
        match r {
            AlgorithmRepr::Name(name) => AlgorithmConfig::new(name),
            AlgorithmRepr::Full(f) => AlgorithmConfig {
                name: f.name,
                sigma: f.sigma,
                eta: f.eta,
                step: f.step,
                label: f.label,
            },
        }
    }
}

impl AlgorithmConfig {
    pub fn new(name: AlgorithmKind) -> Self {
        AlgorithmConfig {
            name,
            sigma: Param::default(),
            eta: Param::default(),
            step: StepChoice::Auto,
            label: None,
        }
    }

    pub fn with_step(mut self, step: StepChoice) -> Self {
        self.step = step;
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = Param::Value(sigma);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Name used in result tables.
    pub fn display_label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.name.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IidKind {
    RademacherLinear,
    UniformQuadratic,
}

/// Which Bernoulli bias the sectioned adversary uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bias {
    Plus,
    Minus,
    /// `p_+` or `p_-` with equal probability, drawn once per game.
    #[default]
    Random,
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AdversaryConfig {
    Iid {
        sampler: IidKind,
        /// Curvature of `uniform-quadratic` losses.
        #[serde(default = "one")]
        lambda: f64,
    },
    /// Loss file in the line-oriented text format.
    Replay {
        path: PathBuf,
    },
    SectionedBernoulli {
        #[serde(rename = "C", default = "one_usize")]
        c: usize,
        #[serde(default)]
        bias: Bias,
    },
    AdaptivePusher,
}

impl AdversaryConfig {
    pub fn is_adaptive(&self) -> bool {
        matches!(self, AdversaryConfig::AdaptivePusher)
    }

    /// Name used in result tables; never contains commas.
    pub fn label(&self) -> String {
        match self {
            AdversaryConfig::Iid {
                sampler: IidKind::RademacherLinear,
                ..
            } => "iid-rademacher-linear".into(),
            AdversaryConfig::Iid {
                sampler: IidKind::UniformQuadratic,
                lambda,
            } => {
                if *lambda == 1.0 {
                    "iid-uniform-quadratic".into()
                } else {
                    format!("iid-uniform-quadratic-lambda{lambda}")
                }
            }
            AdversaryConfig::Replay { path } => {
                let name = path.file_name().map(|n| n.to_string_lossy().into_owned());
                format!("replay-{}", name.unwrap_or_default()).replace([',', '"', '\n', '\r'], "_")
            }
            AdversaryConfig::SectionedBernoulli { c, bias } => {
                let b = match bias {
                    Bias::Plus => "plus",
                    Bias::Minus => "minus",
                    Bias::Random => "random",
                };
                format!("sectioned-bernoulli-C{c}-{b}")
            }
            AdversaryConfig::AdaptivePusher => "adaptive-pusher".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryModel {
    #[default]
    Oblivious,
    Adaptive,
}

fn one_or_many<'de, D, T>(de: D) -> std::result::Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(match OneOrMany::deserialize(de)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

fn default_seeds() -> usize {
    1
}

pub const DEFAULT_PSEUDO_REGRET_SAMPLES: usize = 1_000_000;

fn default_samples() -> usize {
    DEFAULT_PSEUDO_REGRET_SAMPLES
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(deserialize_with = "one_or_many")]
    pub algorithm: Vec<AlgorithmConfig>,
    #[serde(deserialize_with = "one_or_many")]
    pub adversary: Vec<AdversaryConfig>,
    #[serde(rename = "T", deserialize_with = "one_or_many")]
    pub horizon: Vec<usize>,
    #[serde(rename = "S", deserialize_with = "one_or_many")]
    pub switches: Vec<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    /// Base seed every run's randomness derives from.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub adversary_model: AdversaryModel,
    /// Feasible set; defaults to `[-1, 1]^d` with `d` taken from the adversary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
    /// Lipschitz bound used for tuning; defaults to the adversary's declared `G`.
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
    /// Diameter used for tuning; defaults to the domain's.
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub diameter: Option<f64>,
    /// Strong convexity used for tuning; defaults to the adversary's.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Fresh i.i.d. draws used to estimate the pseudo-regret comparator; 0 disables.
    #[serde(default = "default_samples")]
    pub pseudo_regret_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json_output: Option<PathBuf>,
    /// Directory receiving one CSV per game.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_dump: Option<PathBuf>,
}

impl RunConfig {
    /// Parses and validates a configuration. Relative paths are kept as is.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a configuration file; relative replay paths resolve against
    /// the file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for adv in &mut cfg.adversary {
            if let AdversaryConfig::Replay { path } = adv {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.algorithm.is_empty() || self.adversary.is_empty() {
            return bad("algorithm and adversary lists must be nonempty");
        }
        if self.horizon.is_empty() || self.switches.is_empty() {
            return bad("T and S lists must be nonempty");
        }
        if self.horizon.contains(&0) || self.switches.contains(&0) {
            return bad("T and S must be positive");
        }
        if self.seeds == 0 {
            return bad("seeds must be at least 1");
        }
        for a in &self.algorithm {
            if let Some(label) = &a.label {
                if label.is_empty() || label.contains([',', '"', '\n', '\r']) {
                    return bad(
                        "algorithm labels must be nonempty and free of commas, quotes and newlines",
                    );
                }
            }
        }
        for adv in &self.adversary {
            check_model(adv, self.adversary_model)?;
        }
        Ok(())
    }
}

/// Adaptive adversaries need an explicit adaptive model.
pub fn check_model(adversary: &AdversaryConfig, model: AdversaryModel) -> Result<()> {
    if adversary.is_adaptive() && model != AdversaryModel::Adaptive {
        return Err(Error::Config(format!(
            "adversary {} is adaptive; set adversary_model to \"adaptive\" to allow it",
            adversary.label()
        )));
    }
    Ok(())
}
