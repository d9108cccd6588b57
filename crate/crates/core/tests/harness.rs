use std::fmt::Write as _;
use std::io::Write as _;

use lazy_oco::harness::{
    cell_seed, estimate_seed, run_game, sweep, tune, AdversaryConfig, AdversaryModel,
    AlgorithmConfig, AlgorithmKind, Bias, Environment, IidKind, Overrides, RunConfig, Scenario,
    StepChoice, SweepCell, SweepSpec, TuningInput, CSV_HEADER,
};
use lazy_oco::losses::parse_loss_sequence;
use lazy_oco::{Domain, Error};
use rand::{Rng, SeedableRng};

fn rademacher() -> AdversaryConfig {
    AdversaryConfig::Iid {
        sampler: IidKind::RademacherLinear,
        lambda: 1.0,
    }
}

fn uniform_quadratic() -> AdversaryConfig {
    AdversaryConfig::Iid {
        sampler: IidKind::UniformQuadratic,
        lambda: 1.0,
    }
}

fn env() -> Environment {
    Environment {
        model: AdversaryModel::Adaptive,
        pseudo_regret_samples: 10_000,
        ..Environment::default()
    }
}

fn all_pairs() -> Vec<(AlgorithmConfig, AdversaryConfig)> {
    let mut out = Vec::new();
    for alg in AlgorithmKind::ALL {
        let advs = if alg == AlgorithmKind::FtprllSc {
            vec![uniform_quadratic(), AdversaryConfig::AdaptivePusher]
        } else {
            vec![
                rademacher(),
                uniform_quadratic(),
                AdversaryConfig::SectionedBernoulli {
                    c: 1,
                    bias: Bias::Random,
                },
                AdversaryConfig::AdaptivePusher,
            ]
        };
        for adv in advs {
            out.push((AlgorithmConfig::new(alg), adv));
        }
    }
    out
}

fn zeros_file(t: usize) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    for _ in 0..t {
        writeln!(f, "linear 0").unwrap();
    }
    f
}

#[test]
fn ogd_against_zero_losses() {
    let f = zeros_file(5);
    let adv = AdversaryConfig::Replay {
        path: f.path().to_path_buf(),
    };
    let s = Scenario::prepare(
        &AlgorithmConfig::new(AlgorithmKind::Ogd),
        &adv,
        5,
        1,
        &env(),
        0,
    )
    .unwrap();
    let trace = run_game(&s, 1).unwrap();
    assert_eq!(trace.regret, 0.0);
    assert_eq!(trace.switches, 0);
    assert_eq!(trace.decisions.len(), 5);
    assert_eq!(trace.switch_flags.len(), 4);
}

#[test]
fn replay_shorter_than_horizon_is_rejected() {
    let f = zeros_file(3);
    let adv = AdversaryConfig::Replay {
        path: f.path().to_path_buf(),
    };
    let err = Scenario::prepare(
        &AlgorithmConfig::new(AlgorithmKind::Ogd),
        &adv,
        5,
        1,
        &env(),
        0,
    )
    .unwrap_err();
    assert!(matches!(err, Error::Config(_)));
}

#[test]
fn traces_are_deterministic_consistent_and_feasible() {
    for (alg, adv) in all_pairs() {
        let s = Scenario::prepare(&alg, &adv, 200, 8, &env(), 3).unwrap();
        let a = run_game(&s, 42).unwrap();
        let b = run_game(&s, 42).unwrap();
        assert_eq!(a.decisions, b.decisions, "{alg:?} {adv:?}");
        assert_eq!(a.loss_values, b.loss_values);
        assert_eq!(a.switch_flags, b.switch_flags);
        assert_eq!(a.regret.to_bits(), b.regret.to_bits());

        let flagged = a.switch_flags.iter().filter(|f| **f).count() + a.initial_switch as usize;
        assert_eq!(a.switches, flagged);
        for (t, flag) in a.switch_flags.iter().enumerate() {
            if !flag {
                let same = a.decisions[t]
                    .iter()
                    .zip(&a.decisions[t + 1])
                    .all(|(x, y)| x.to_bits() == y.to_bits());
                assert!(same, "{alg:?} {adv:?} round {}", t + 1);
            }
        }
        for w in &a.decisions {
            assert!(s.domain().contains(w, 1e-9).unwrap());
        }
        assert_eq!(
            a.pseudo_regret_estimate.is_some(),
            matches!(adv, AdversaryConfig::Iid { .. })
        );
    }
}

/// The reported hindsight point beats every decision actually played, and the
/// per-round losses and regret agree with a direct re-evaluation.
#[test]
fn regret_is_measured_against_a_true_minimizer() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let mut text = String::new();
    for _ in 0..150 {
        if rng.random_bool(0.5) {
            writeln!(
                text,
                "linear {} {}",
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0)
            )
            .unwrap();
        } else {
            let (a, b): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            writeln!(text, "quad 1 {a} {b}").unwrap();
        }
    }
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    let seq = parse_loss_sequence(&text, Some(&Domain::cube(2, -1.0, 1.0).unwrap())).unwrap();
    let adv = AdversaryConfig::Replay {
        path: f.path().to_path_buf(),
    };
    for alg in [
        AlgorithmKind::Ogd,
        AlgorithmKind::FtprllConvex,
        AlgorithmKind::LazySgd,
        AlgorithmKind::BlockedOgd,
    ] {
        let s = Scenario::prepare(&AlgorithmConfig::new(alg), &adv, 150, 10, &env(), 0).unwrap();
        let trace = run_game(&s, 4).unwrap();
        let best = seq.total(&trace.hindsight_optimum).unwrap();
        for (t, w) in trace.decisions.iter().enumerate() {
            assert!(seq.total(w).unwrap() >= best - 1e-9, "{alg}");
            let direct = seq.losses()[t].eval(w).unwrap();
            assert!((trace.loss_values[t] - direct).abs() <= 1e-12);
        }
        assert!((trace.regret - (trace.total_loss() - best)).abs() <= 1e-9);
    }
}

#[test]
fn different_seeds_differ() {
    let s = Scenario::prepare(
        &AlgorithmConfig::new(AlgorithmKind::FtprllConvex),
        &rademacher(),
        100,
        4,
        &env(),
        0,
    )
    .unwrap();
    assert_ne!(
        run_game(&s, 1).unwrap().loss_values,
        run_game(&s, 2).unwrap().loss_values
    );
}

#[test]
fn adaptive_adversary_requires_adaptive_model() {
    let oblivious = Environment {
        model: AdversaryModel::Oblivious,
        ..env()
    };
    let err = Scenario::prepare(
        &AlgorithmConfig::new(AlgorithmKind::BlockedOgd),
        &AdversaryConfig::AdaptivePusher,
        100,
        4,
        &oblivious,
        0,
    )
    .unwrap_err();
    assert!(matches!(err, Error::Config(_)));
}

#[test]
fn strongly_convex_tuning_on_linear_losses_is_a_config_error() {
    let err = Scenario::prepare(
        &AlgorithmConfig::new(AlgorithmKind::FtprllSc),
        &rademacher(),
        100,
        4,
        &env(),
        0,
    )
    .unwrap_err();
    assert!(matches!(err, Error::Config(_)));
}

#[test]
fn lower_bound_adversaries_need_the_unit_interval() {
    let e = Environment {
        domain: Some(Domain::cube(2, -1.0, 1.0).unwrap()),
        ..env()
    };
    assert!(Scenario::prepare(
        &AlgorithmConfig::new(AlgorithmKind::Ogd),
        &AdversaryConfig::AdaptivePusher,
        10,
        2,
        &e,
        0
    )
    .is_err());
}

/// Switch bound `E S_T <= (G/2) sum_t 1/sigma_t` for both tunings.
#[test]
fn ftprll_mean_switches_respect_the_bound() {
    let seeds = 60u64;
    let t_max = 512usize;
    let cases = [
        (AlgorithmKind::FtprllConvex, rademacher(), 8usize),
        (AlgorithmKind::FtprllSc, uniform_quadratic(), 16usize),
    ];
    for (alg, adv, s_target) in cases {
        let s = Scenario::prepare(&AlgorithmConfig::new(alg), &adv, t_max, s_target, &env(), 0)
            .unwrap();
        let plan = s.plan();
        let g = plan.input.lipschitz;
        let sched = plan.schedule.unwrap();
        let bound: f64 = (1..=t_max).map(|t| g / (2.0 * sched.sigma(t))).sum();
        let mean = (0..seeds)
            .map(|k| run_game(&s, k).unwrap().switches as f64)
            .sum::<f64>()
            / seeds as f64;
        assert!(
            mean <= bound * (1.0 + 3.0 / (seeds as f64).sqrt()),
            "{alg}: {mean} > {bound}"
        );
    }
}

fn cell(alg: AlgorithmKind, adv: AdversaryConfig, t: usize, s: usize) -> SweepCell {
    SweepCell {
        algorithm: AlgorithmConfig::new(alg),
        adversary: adv,
        horizon: t,
        switches: s,
    }
}

fn spec(cells: Vec<SweepCell>, seeds: usize) -> SweepSpec {
    SweepSpec {
        cells,
        seeds,
        base_seed: 11,
        environment: env(),
        trace_dump: None,
    }
}

#[test]
fn single_cell_single_seed_matches_run_game() {
    let c = cell(AlgorithmKind::FtprllConvex, rademacher(), 300, 6);
    let result = sweep(&spec(vec![c.clone()], 1), None).unwrap();
    assert_eq!(result.rows.len(), 1);
    let s = Scenario::prepare(
        &c.algorithm,
        &c.adversary,
        300,
        6,
        &env(),
        estimate_seed(11, &c),
    )
    .unwrap();
    let trace = run_game(&s, cell_seed(11, &c, 0)).unwrap();
    let row = &result.rows[0];
    assert_eq!(row.regret_mean, trace.regret);
    assert_eq!(row.switches_mean, trace.switches as f64);
    assert_eq!(row.regret_std, 0.0);
    assert_eq!(
        row.pseudo_regret_estimate_mean,
        trace.pseudo_regret_estimate
    );
}

#[test]
fn grid_order_and_parallelism_do_not_matter() {
    let cells = vec![
        cell(AlgorithmKind::FtprllSc, uniform_quadratic(), 256, 16),
        cell(AlgorithmKind::Ogd, rademacher(), 256, 4),
        cell(AlgorithmKind::LazySgd, uniform_quadratic(), 128, 1),
        cell(
            AlgorithmKind::BlockedOgd,
            AdversaryConfig::AdaptivePusher,
            256,
            8,
        ),
        cell(
            AlgorithmKind::FtprllConvex,
            AdversaryConfig::SectionedBernoulli {
                c: 1,
                bias: Bias::Plus,
            },
            256,
            4,
        ),
    ];
    let forward = sweep(&spec(cells.clone(), 4), Some(1)).unwrap();
    let mut reversed = cells.clone();
    reversed.reverse();
    let backward = sweep(&spec(reversed, 4), Some(3)).unwrap();
    assert_eq!(forward.to_csv(), backward.to_csv());
    assert_eq!(forward.to_json(), backward.to_json());
    assert!(forward.errors.is_empty());
    assert!(forward.to_csv().starts_with(&format!("{CSV_HEADER}\n")));

    // adding a cell leaves existing rows untouched
    let mut more = cells;
    more.push(cell(AlgorithmKind::Ogd, uniform_quadratic(), 64, 2));
    let extended = sweep(&spec(more, 4), None).unwrap();
    for row in &forward.rows {
        assert!(extended.rows.contains(row));
    }
}

#[test]
fn failing_cells_do_not_abort_siblings() {
    let cells = vec![
        cell(AlgorithmKind::FtprllSc, rademacher(), 64, 4),
        cell(AlgorithmKind::Ogd, rademacher(), 64, 4),
        cell(
            AlgorithmKind::Ogd,
            AdversaryConfig::Replay {
                path: "/nonexistent/losses.txt".into(),
            },
            64,
            4,
        ),
    ];
    let result = sweep(&spec(cells, 2), None).unwrap();
    assert_eq!(result.rows.len(), 1);
    assert_eq!(result.errors.len(), 2);
    assert!(result.errors.iter().all(|e| e.seed_index.is_none()));
}

#[test]
fn bound_annotations_match_closed_forms() {
    let cells = vec![
        cell(AlgorithmKind::FtprllConvex, rademacher(), 1024, 16),
        cell(AlgorithmKind::FtprllSc, uniform_quadratic(), 1024, 64),
        cell(AlgorithmKind::LazySgd, uniform_quadratic(), 1000, 1),
    ];
    let result = sweep(&spec(cells, 1), None).unwrap();
    let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs();
    let ln = 1.0 + 1024f64.ln();
    for row in &result.rows {
        let (regret, switches) = match row.algorithm.as_str() {
            "ftprll-convex" => (192.0, 16.0),
            // G = 2 on [-1, 1], sigma = 2 sqrt(1024) / 64 = 1
            "ftprll-sc" => ((2.0 * 4.0 + 2.0) * ln / 1.0, 64.0),
            "lazy-sgd" => {
                let l = 1.0 + 1000f64.ln();
                (4.0 * l * l, 10.0)
            }
            other => panic!("{other}"),
        };
        assert!(rel(row.bound_regret, regret), "{row:?}");
        assert!(rel(row.bound_switches, switches), "{row:?}");
    }
}

#[test]
fn tune_matches_hand_arithmetic() {
    let input = TuningInput {
        horizon: 1024,
        switches: 16,
        lipschitz: 1.0,
        diameter: 2.0,
        lambda: 0.0,
        dimension: 1,
    };
    let plan = tune(
        AlgorithmKind::FtprllConvex,
        input,
        StepChoice::Auto,
        Overrides::default(),
    )
    .unwrap();
    assert_eq!(plan.sigma, Some(32.0));
    assert_eq!(plan.eta, Some(0.03125));
}

#[test]
fn trace_dumps_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let mut sp = spec(vec![cell(AlgorithmKind::Ogd, rademacher(), 10, 2)], 2);
    sp.trace_dump = Some(dir.path().join("traces"));
    sweep(&sp, None).unwrap();
    let files: Vec<_> = std::fs::read_dir(dir.path().join("traces"))
        .unwrap()
        .collect();
    assert_eq!(files.len(), 2);
    let text = std::fs::read_to_string(files[0].as_ref().unwrap().path()).unwrap();
    assert!(text.starts_with("t,w_1,loss,switch\n"));
    assert_eq!(text.lines().count(), 11);
}

#[test]
fn run_config_expands_to_a_grid() {
    let cfg = RunConfig::from_json(
        r#"{"algorithm": ["ogd", "lazy-sgd"], "adversary": {"kind": "iid", "sampler": "uniform-quadratic"},
            "T": [64, 128], "S": 4, "seeds": 2, "seed": 5, "pseudo_regret_samples": 100}"#,
    )
    .unwrap();
    let sp = SweepSpec::from_config(&cfg).unwrap();
    assert_eq!(sp.cells.len(), 4);
    let result = sweep(&sp, None).unwrap();
    assert_eq!(result.rows.len(), 4);
    assert!(result.rows.iter().all(|r| r.seeds == 2));
}
