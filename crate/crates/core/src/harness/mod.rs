//! Game runner, regret and switch accounting, parameter tuning,
//! switching-cost conversions, and deterministic sweeps.

mod config;
mod conversion;
mod game;
mod rng;
mod sweep;
mod tuning;

pub use config::{
    check_model, AdversaryConfig, AdversaryModel, AlgorithmConfig, Auto, Bias, IidKind, Param,
    RunConfig, DEFAULT_PSEUDO_REGRET_SAMPLES,
};
pub use conversion::{convert_cost_to_lazy, convert_lazy_to_cost};
pub use game::{estimate_comparator, run_game, Environment, GameTrace, Scenario};
pub use rng::{derive_seed, RunStreams};
pub use sweep::{
    cell_seed, estimate_seed, sweep, CellError, SweepCell, SweepResult, SweepRow, SweepSpec,
    CSV_HEADER,
};
pub use tuning::{tune, AlgorithmKind, Overrides, StepChoice, TuningInput, TuningPlan};
