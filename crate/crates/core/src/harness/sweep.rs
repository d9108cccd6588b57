use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{AdversaryConfig, AlgorithmConfig, RunConfig};
use super::game::{run_game, Environment, GameTrace, Scenario};
use super::rng::derive_seed;
use crate::error::{Error, Result};

/// Exact CSV header of sweep results.
pub const CSV_HEADER: &str =
    "algorithm,adversary,T,S_target,seeds,regret_mean,regret_std,switches_mean,switches_std,bound_regret,bound_switches";

#[derive(Clone, Debug, PartialEq)]
pub struct SweepCell {
    pub algorithm: AlgorithmConfig,
    pub adversary: AdversaryConfig,
    pub horizon: usize,
    pub switches: usize,
}

impl SweepCell {
    /// Canonical identity of the cell; seeds derive from it.
    pub fn key(&self) -> String {
        format!(
            "{}|{}|T={}|S={}",
            serde_json::to_string(&self.algorithm).expect("serializable"),
            serde_json::to_string(&self.adversary).expect("serializable"),
            self.horizon,
            self.switches
        )
    }

    fn sort_key(&self) -> (String, String, usize, usize, String) {
        (
            self.algorithm.display_label(),
            self.adversary.label(),
            self.horizon,
            self.switches,
            self.key(),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub cells: Vec<SweepCell>,
    pub seeds: usize,
    pub base_seed: u64,
    pub environment: Environment,
    /// Directory receiving one trace CSV per game.
    pub trace_dump: Option<PathBuf>,
}

impl SweepSpec {
    /// Grid `algorithm x adversary x T x S` of a run configuration.
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let mut cells = Vec::new();
        for a in &cfg.algorithm {
            for adv in &cfg.adversary {
                for &t in &cfg.horizon {
                    for &s in &cfg.switches {
                        cells.push(SweepCell {
                            algorithm: a.clone(),
                            adversary: adv.clone(),
                            horizon: t,
                            switches: s,
                        });
                    }
                }
            }
        }
        Ok(SweepSpec {
            cells,
            seeds: cfg.seeds,
            base_seed: cfg.seed,
            environment: Environment {
                model: cfg.adversary_model,
                domain: cfg.domain.clone(),
                lipschitz: cfg.lipschitz,
                diameter: cfg.diameter,
                lambda: cfg.lambda,
                pseudo_regret_samples: cfg.pseudo_regret_samples,
            },
            trace_dump: cfg.trace_dump.clone(),
        })
    }
}

/// Seed of replicate `index` in `cell`.
pub fn cell_seed(base_seed: u64, cell: &SweepCell, index: u64) -> u64 {
    derive_seed(base_seed, &cell.key(), index)
}

/// Seed of the comparator estimate for `cell`.
pub fn estimate_seed(base_seed: u64, cell: &SweepCell) -> u64 {
    derive_seed(base_seed, &format!("{}|estimate", cell.key()), 0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub algorithm: String,
    pub adversary: String,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(rename = "S_target")]
    pub switches_target: usize,
    pub seeds: usize,
    pub regret_mean: f64,
    pub regret_std: f64,
    pub switches_mean: f64,
    pub switches_std: f64,
    pub bound_regret: f64,
    pub bound_switches: f64,
    /// Mean pseudo-regret against an estimated comparator (i.i.d. only).
    pub pseudo_regret_estimate_mean: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellError {
    pub algorithm: String,
    pub adversary: String,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(rename = "S_target")]
    pub switches_target: usize,
    /// Failing replicate, or none when the cell could not be prepared.
    pub seed_index: Option<usize>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub errors: Vec<CellError>,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl SweepResult {
    /// CSV with [`CSV_HEADER`]; floats carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.algorithm,
                r.adversary,
                r.horizon,
                r.switches_target,
                r.seeds,
                r.regret_mean,
                r.regret_std,
                r.switches_mean,
                r.switches_std,
                r.bound_regret,
                r.bound_switches
            )
            .unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

fn summarize(cell: &SweepCell, scenario: &Scenario, traces: &[GameTrace]) -> SweepRow {
    let regrets: Vec<f64> = traces.iter().map(|t| t.regret).collect();
    let switches: Vec<f64> = traces.iter().map(|t| t.switches as f64).collect();
    let (regret_mean, regret_std) = mean_std(&regrets);
    let (switches_mean, switches_std) = mean_std(&switches);
    let pseudo: Option<Vec<f64>> = traces.iter().map(|t| t.pseudo_regret_estimate).collect();
    SweepRow {
        algorithm: cell.algorithm.display_label(),
        adversary: cell.adversary.label(),
        horizon: cell.horizon,
        switches_target: cell.switches,
        seeds: traces.len(),
        regret_mean,
        regret_std,
        switches_mean,
        switches_std,
        bound_regret: scenario.plan().bound_regret,
        bound_switches: scenario.plan().bound_switches,
        pseudo_regret_estimate_mean: pseudo.map(|p| mean_std(&p).0),
    }
}

fn cell_error(cell: &SweepCell, seed_index: Option<usize>, e: &Error) -> CellError {
    CellError {
        algorithm: cell.algorithm.display_label(),
        adversary: cell.adversary.label(),
        horizon: cell.horizon,
        switches_target: cell.switches,
        seed_index,
        message: e.to_string(),
    }
}

fn dump_name(cell: &SweepCell, index: usize) -> String {
    let tag = derive_seed(0, &cell.key(), 0) as u32;
    format!(
        "{}__{}__T{}__S{}__{tag:08x}__seed{index}.csv",
        cell.algorithm.display_label(),
        cell.adversary.label(),
        cell.horizon,
        cell.switches
    )
    .replace(['/', '\\', ' '], "_")
}

/// Runs every cell for `spec.seeds` replicates on up to `jobs` threads.
///
/// Rows come out in canonical order (algorithm, adversary, T, S), and the
/// per-cell reduction runs in replicate order, so the result does not depend
/// on grid order or thread count. A failing cell is reported in
/// [`SweepResult::errors`] without stopping the others.
pub fn sweep(spec: &SweepSpec, jobs: Option<usize>) -> Result<SweepResult> {
    if spec.cells.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    if spec.seeds == 0 {
        return Err(Error::Config("seeds must be at least 1".into()));
    }
    let mut cells = spec.cells.clone();
    cells.sort_by_key(SweepCell::sort_key);
    if cells.windows(2).any(|w| w[0].key() == w[1].key()) {
        return Err(Error::Config("sweep grid contains duplicate cells".into()));
    }
    if let Some(dir) = &spec.trace_dump {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }

    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    let threads = jobs.unwrap_or(cells.len().min(available)).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    pool.install(|| {
        let scenarios: Vec<Result<Scenario>> = cells
            .par_iter()
            .map(|c| {
                Scenario::prepare(
                    &c.algorithm,
                    &c.adversary,
                    c.horizon,
                    c.switches,
                    &spec.environment,
                    estimate_seed(spec.base_seed, c),
                )
            })
            .collect();

        let jobs_list: Vec<(usize, usize)> = scenarios
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_ok())
            .flat_map(|(i, _)| (0..spec.seeds).map(move |k| (i, k)))
            .collect();
        let traces: Vec<Result<GameTrace>> = jobs_list
            .par_iter()
            .map(|&(i, k)| {
                let scenario = scenarios[i].as_ref().expect("filtered");
                let trace = run_game(scenario, cell_seed(spec.base_seed, &cells[i], k as u64))?;
                if let Some(dir) = &spec.trace_dump {
                    std::fs::write(dir.join(dump_name(&cells[i], k)), trace.to_csv())?;
                }
                Ok(trace)
            })
            .collect();

        let mut result = SweepResult::default();
        let mut traces = traces.into_iter();
        for (i, scenario) in scenarios.iter().enumerate() {
            let cell = &cells[i];
            let scenario = match scenario {
                Ok(s) => s,
                Err(e) => {
                    result.errors.push(cell_error(cell, None, e));
                    continue;
                }
            };
            let mut ok = Vec::with_capacity(spec.seeds);
            let mut failed = None;
            for k in 0..spec.seeds {
                match traces.next().expect("one trace per job") {
                    Ok(t) => ok.push(t),
                    Err(e) => {
                        failed.get_or_insert((k, e));
                    }
                }
            }
            match failed {
                Some((k, e)) => result.errors.push(cell_error(cell, Some(k), &e)),
                None => result.rows.push(summarize(cell, scenario, &ok)),
            }
        }
        Ok(result)
    })
}
