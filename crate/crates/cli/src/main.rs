use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lazy_oco::coupling::validation::validate_sampler;
use lazy_oco::harness::{
    convert_cost_to_lazy, convert_lazy_to_cost, run_game, sweep, tune, AdversaryConfig,
    AdversaryModel, AlgorithmConfig, AlgorithmKind, Bias, Environment, IidKind, Overrides, Param,
    RunConfig, Scenario, StepChoice, SweepSpec, TuningInput, TuningPlan,
};
use lazy_oco::{Domain, Error};

/// Simulation suite for lazy online convex optimization.
#[derive(Debug, Parser)]
#[command(name = "lazy-oco", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Play one game and print T, regret and switch count.
    Run(RunArgs),
    /// Run a grid of games from a JSON run configuration.
    Sweep(SweepArgs),
    /// Print tuned parameters and bounds.
    Tune(TuneArgs),
    /// Switching-cost conversions.
    Convert(ConvertArgs),
    /// Statistical self-check of the coupling sampler.
    ValidateSampler(ValidateArgs),
}

/// A number, or `auto` to take the value from the adversary or tuning.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Setting(Option<f64>);

impl FromStr for Setting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Setting(None));
        }
        s.parse::<f64>()
            .map(|v| Setting(Some(v)))
            .map_err(|_| format!("expected a number or \"auto\", got {s:?}"))
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("auto"),
        }
    }
}

fn parse_alg(s: &str) -> Result<AlgorithmKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_step(s: &str) -> Result<StepChoice, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_domain(s: &str) -> Result<Domain, String> {
    serde_json::from_str(s).map_err(|e| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AdversaryArg {
    IidRademacherLinear,
    IidUniformQuadratic,
    Replay,
    SectionedBernoulli,
    AdaptivePusher,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BiasArg {
    Plus,
    Minus,
    Random,
}

#[derive(Debug, Args)]
struct Tuning {
    /// Algorithm: ftprll-convex, ftprll-sc, lazy-sgd, ogd or blocked-ogd.
    #[arg(long, value_parser = parse_alg, default_value = "ftprll-convex")]
    alg: AlgorithmKind,
    /// Horizon.
    #[arg(long = "T", default_value_t = 1000)]
    t: usize,
    /// Target switch count.
    #[arg(long = "S", default_value_t = 10)]
    s: usize,
    /// Lipschitz bound used for tuning.
    #[arg(long = "G", default_value = "auto")]
    g: Setting,
    /// Diameter used for tuning.
    #[arg(long = "D", default_value = "auto")]
    d: Setting,
    /// Strong convexity used for tuning.
    #[arg(long, default_value = "auto")]
    lambda: Setting,
    /// Perturbation scale; overrides the tuned value.
    #[arg(long, default_value = "auto")]
    sigma: Setting,
    /// Regularization rate or constant step; overrides the tuned value.
    #[arg(long, default_value = "auto")]
    eta: Setting,
    /// Step-size rule for gradient players: auto, convex or strongly-convex.
    #[arg(long, value_parser = parse_step, default_value = "auto")]
    step: StepChoice,
}

impl Tuning {
    fn algorithm(&self) -> AlgorithmConfig {
        let param = |s: Setting| s.0.map_or(Param::default(), Param::Value);
        AlgorithmConfig {
            sigma: param(self.sigma),
            eta: param(self.eta),
            ..AlgorithmConfig::new(self.alg).with_step(self.step)
        }
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    tuning: Tuning,
    /// Loss generator.
    #[arg(long, value_enum, default_value_t = AdversaryArg::IidRademacherLinear)]
    adversary: AdversaryArg,
    /// Loss file for the replay adversary.
    #[arg(
        long,
        value_name = "PATH",
        help = "Loss file for the replay adversary [default: none]"
    )]
    losses: Option<PathBuf>,
    /// Dimension of the default domain [-1, 1]^d.
    #[arg(long = "d", default_value_t = 1)]
    dim: usize,
    /// Feasible set as JSON, e.g. {"kind":"ball","center":[0,0],"radius":1}.
    #[arg(
        long,
        value_parser = parse_domain,
        help = "Feasible set as JSON, e.g. {\"kind\":\"ball\",\"center\":[0,0],\"radius\":1} [default: [-1, 1]^d]"
    )]
    domain: Option<Domain>,
    /// Curvature of i.i.d. quadratic losses.
    #[arg(long = "loss-lambda", default_value_t = 1.0)]
    loss_lambda: f64,
    /// Sectioned adversary constant.
    #[arg(long = "C", default_value_t = 1)]
    c: usize,
    /// Sectioned adversary bias.
    #[arg(long, value_enum, default_value_t = BiasArg::Random)]
    bias: BiasArg,
    /// Game seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Draws used to estimate the i.i.d. pseudo-regret comparator; 0 disables.
    #[arg(long, default_value_t = lazy_oco::harness::DEFAULT_PSEUDO_REGRET_SAMPLES)]
    samples: usize,
    #[arg(
        long,
        value_name = "PATH",
        help = "Per-round trace CSV [default: none]"
    )]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(
        long,
        value_name = "PATH",
        help = "JSON run configuration (required) [default: none]"
    )]
    config: PathBuf,
    #[arg(
        long,
        help = "Base seed; overrides the configuration [default: from config]"
    )]
    seed: Option<u64>,
    #[arg(
        long,
        help = "Replicates per cell; overrides the configuration [default: from config]"
    )]
    seeds: Option<usize>,
    #[arg(
        long,
        help = "Comparator-estimate draws; overrides the configuration [default: from config]"
    )]
    samples: Option<usize>,
    #[arg(
        long,
        value_name = "PATH",
        help = "Result CSV [default: from config, else stdout]"
    )]
    out: Option<PathBuf>,
    #[arg(
        long,
        value_name = "PATH",
        help = "Result JSON [default: from config, else not written]"
    )]
    json: Option<PathBuf>,
    #[arg(
        long,
        value_name = "DIR",
        help = "Directory for per-game trace CSVs [default: from config, else none]"
    )]
    trace_dump: Option<PathBuf>,
    #[arg(
        long,
        help = "Worker threads [default: cells, capped at available parallelism]"
    )]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct TuneArgs {
    #[command(flatten)]
    tuning: Tuning,
    /// Dimension.
    #[arg(long = "d", default_value_t = 1)]
    dim: usize,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("direction").required(true).args(["alpha", "gamma"]))]
struct ConvertArgs {
    #[arg(
        long,
        help = "Switching-cost regret exponent; prints the lazy regret (T/S)^(alpha/(1-alpha)) [default: none]"
    )]
    alpha: Option<f64>,
    #[arg(
        long,
        help = "Lazy regret exponent; prints the switching-cost regret T^(1/(1+gamma)) c^(gamma/(1+gamma)) [default: none]"
    )]
    gamma: Option<f64>,
    /// Horizon.
    #[arg(long = "T", default_value_t = 1000.0)]
    t: f64,
    /// Switch budget (with --alpha).
    #[arg(long = "S", default_value_t = 10.0)]
    s: f64,
    /// Per-switch cost (with --gamma).
    #[arg(long = "c", default_value_t = 1.0)]
    c: f64,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Couplings per check.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Four significant digits, trailing zeros dropped.
fn human(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..15).contains(&magnitude) {
        return format!("{x:.3e}");
    }
    let decimals = (3 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn echo(name: &str, used: Option<f64>, tuned: Option<f64>) -> Option<String> {
    let used = used?;
    Some(match tuned {
        Some(t) if t.to_bits() != used.to_bits() => {
            format!("{name}: {} (override; tuned {})", human(used), human(t))
        }
        _ => format!("{name}: {}", human(used)),
    })
}

fn print_plan(plan: &TuningPlan) {
    println!("algorithm: {}", plan.algorithm);
    let i = &plan.input;
    println!(
        "T: {}  S: {}  G: {}  D: {}  lambda: {}  d: {}",
        i.horizon,
        i.switches,
        human(i.lipschitz),
        human(i.diameter),
        human(i.lambda),
        i.dimension
    );
    if let Some(line) = echo("sigma", plan.sigma, plan.tuned_sigma) {
        let scaled = matches!(
            plan.schedule,
            Some(lazy_oco::algorithms::PerturbationSchedule::SqrtScaled { .. })
        );
        println!(
            "{line}{}",
            if scaled {
                "  (sigma_t = sqrt(t) * sigma)"
            } else {
                ""
            }
        );
    }
    if let Some(line) = echo("eta", plan.eta, plan.tuned_eta) {
        println!("{line}");
    }
    if let Some(step) = &plan.step {
        use lazy_oco::algorithms::StepRule;
        let text = match step {
            StepRule::Constant(e) => format!("constant {}", human(*e)),
            StepRule::InvSqrt { scale } => format!("{} / sqrt(t)", human(*scale)),
            StepRule::InvLinear { lambda } => format!("1 / ({} t)", human(*lambda)),
        };
        println!("step: {text}");
    }
    if let Some(b) = plan.block_length {
        println!("block length: {b}");
    }
    println!("bound_regret: {}", human(plan.bound_regret));
    println!("bound_switches: {}", human(plan.bound_switches));
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn cmd_run(args: RunArgs) -> Result<ExitCode, Error> {
    let adversary = match args.adversary {
        AdversaryArg::IidRademacherLinear => AdversaryConfig::Iid {
            sampler: IidKind::RademacherLinear,
            lambda: args.loss_lambda,
        },
        AdversaryArg::IidUniformQuadratic => AdversaryConfig::Iid {
            sampler: IidKind::UniformQuadratic,
            lambda: args.loss_lambda,
        },
        AdversaryArg::Replay => AdversaryConfig::Replay {
            path: args
                .losses
                .clone()
                .ok_or_else(|| Error::Config("--adversary replay needs --losses".into()))?,
        },
        AdversaryArg::SectionedBernoulli => AdversaryConfig::SectionedBernoulli {
            c: args.c,
            bias: match args.bias {
                BiasArg::Plus => Bias::Plus,
                BiasArg::Minus => Bias::Minus,
                BiasArg::Random => Bias::Random,
            },
        },
        AdversaryArg::AdaptivePusher => AdversaryConfig::AdaptivePusher,
    };
    let domain = match (args.domain, &adversary) {
        (Some(d), _) => Some(d),
        // replay files carry their own dimension
        (None, AdversaryConfig::Replay { .. }) if args.dim == 1 => None,
        (None, _) => Some(Domain::cube(args.dim, -1.0, 1.0)?),
    };
    let env = Environment {
        model: if adversary.is_adaptive() {
            AdversaryModel::Adaptive
        } else {
            AdversaryModel::Oblivious
        },
        domain,
        lipschitz: args.tuning.g.0,
        diameter: args.tuning.d.0,
        lambda: args.tuning.lambda.0,
        pseudo_regret_samples: args.samples,
    };
    let algorithm = args.tuning.algorithm();
    let scenario = Scenario::prepare(
        &algorithm,
        &adversary,
        args.tuning.t,
        args.tuning.s,
        &env,
        args.seed,
    )?;
    let trace = run_game(&scenario, args.seed)?;

    print_plan(scenario.plan());
    println!("adversary: {}", adversary.label());
    println!("seed: {}", args.seed);
    println!("T: {}", args.tuning.t);
    println!("Re_T: {}", human(trace.regret));
    println!("S_T: {}", trace.switches);
    if let Some(p) = trace.pseudo_regret_estimate {
        println!(
            "pseudo-regret (estimated comparator, {} draws): {}",
            args.samples,
            human(p)
        );
    }
    eprintln!("wall time: {:.3} s", trace.wall_time.as_secs_f64());
    if let Some(out) = &args.out {
        write_file(out, &trace.to_csv())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode, Error> {
    let mut cfg = RunConfig::from_file(&args.config)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(n) = args.seeds {
        cfg.seeds = n;
    }
    if let Some(n) = args.samples {
        cfg.pseudo_regret_samples = n;
    }
    cfg.output = args.out.or(cfg.output);
    cfg.json_output = args.json.or(cfg.json_output);
    cfg.trace_dump = args.trace_dump.or(cfg.trace_dump);
    if args.jobs == Some(0) {
        return Err(Error::Config("--jobs must be at least 1".into()));
    }

    let spec = SweepSpec::from_config(&cfg)?;
    let result = sweep(&spec, args.jobs)?;
    let csv = result.to_csv();
    match &cfg.output {
        Some(path) => {
            write_file(path, &csv)?;
            println!("wrote {} rows to {}", result.rows.len(), path.display());
        }
        None => print!("{csv}"),
    }
    if let Some(path) = &cfg.json_output {
        write_file(path, &result.to_json())?;
    }
    for e in &result.errors {
        let which = e.seed_index.map_or(String::new(), |k| format!(" seed {k}"));
        eprintln!(
            "error: {} vs {} T={} S={}{which}: {}",
            e.algorithm, e.adversary, e.horizon, e.switches_target, e.message
        );
    }
    Ok(if result.errors.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn cmd_tune(args: TuneArgs) -> Result<ExitCode, Error> {
    let t = &args.tuning;
    let input = TuningInput {
        horizon: t.t,
        switches: t.s,
        lipschitz: t.g.0.unwrap_or(1.0),
        diameter: t.d.0.unwrap_or(2.0 * (args.dim as f64).sqrt()),
        lambda: t.lambda.0.unwrap_or(0.0),
        dimension: args.dim,
    };
    let overrides = Overrides {
        sigma: t.sigma.0,
        eta: t.eta.0,
    };
    print_plan(&tune(t.alg, input, t.step, overrides)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_convert(args: ConvertArgs) -> Result<ExitCode, Error> {
    if let Some(alpha) = args.alpha {
        let v = convert_cost_to_lazy(alpha, args.t, args.s)?;
        println!("lazy regret: {}", human(v));
    }
    if let Some(gamma) = args.gamma {
        let v = convert_lazy_to_cost(gamma, args.t, args.c)?;
        println!("switching-cost regret: {}", human(v));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(args: ValidateArgs) -> Result<ExitCode, Error> {
    if args.samples < 2 {
        return Err(Error::Config("--samples must be at least 2".into()));
    }
    let checks = validate_sampler(args.samples, args.seed)?;
    let mut ok = true;
    for c in &checks {
        ok &= c.passed;
        println!(
            "{} {}: measured {} expected {} tolerance {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            human(c.measured),
            human(c.expected),
            human(c.tolerance)
        );
    }
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Tune(a) => cmd_tune(a),
        Command::Convert(a) => cmd_convert(a),
        Command::ValidateSampler(a) => cmd_validate(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
