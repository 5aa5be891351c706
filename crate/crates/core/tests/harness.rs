use std::fs;

use trainopt::harness::config::{OptimizerConfig, ProblemConfig, ScheduleConfig};
use trainopt::harness::{
    compute_reports, emit_results, expand_grid, run_experiment, run_single, ExperimentConfig,
    Method, Mode, RunSettings,
};
use trainopt::metrics::{records_from_json, records_to_csv, records_to_json, Tracking};
use trainopt::theory::{rate_fit, DEFAULT_BURN_IN};

fn small_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(
        ProblemConfig::Quadratic {
            dim: 4,
            kappa: 5.0,
            n_samples: 32,
            seed: 2,
        },
        vec![
            OptimizerConfig {
                gamma: Some(vec![1e-3, 5e-3]),
                ..OptimizerConfig::new(Method::Adam)
            },
            OptimizerConfig {
                gamma: Some(vec![0.01, 0.05]),
                alpha: Some(vec![0.0, 0.1]),
                beta: Some(vec![0.5]),
                ..OptimizerConfig::new(Method::Diagonal)
            },
        ],
    );
    cfg.batch_size = 8;
    cfg.epochs = 5;
    cfg.schedules = ScheduleConfig {
        constant: true,
        decay_rates: vec![0.8],
    };
    cfg.tracking = Tracking {
        gap: true,
        variance: true,
    };
    cfg
}

#[test]
fn identical_config_gives_identical_bytes() {
    let cfg = small_config();
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(
        records_to_json(&a.records).unwrap(),
        records_to_json(&b.records).unwrap()
    );
    assert_eq!(
        records_to_csv(&a.records).unwrap(),
        records_to_csv(&b.records).unwrap()
    );

    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let m1 = emit_results(&a.records, &a.reports, d1.path()).unwrap();
    let m2 = emit_results(&b.records, &b.reports, d2.path()).unwrap();
    assert_eq!(m1.len(), m2.len());
    for (p1, p2) in m1.iter().zip(&m2) {
        assert_eq!(
            fs::read(p1).unwrap(),
            fs::read(p2).unwrap(),
            "{}",
            p1.display()
        );
    }
    // Re-emitting into the same directory is byte-stable too.
    let again = emit_results(&a.records, &a.reports, d1.path()).unwrap();
    assert_eq!(again, m1);
}

#[test]
fn parallel_matches_sequential() {
    let cfg = small_config();
    let parallel = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| run_experiment(&cfg).unwrap());
    let problem = cfg.build_problem().unwrap();
    let settings = RunSettings::from_config(&cfg);
    let mut sequential = Vec::new();
    for point in expand_grid(&cfg).unwrap() {
        for &seed in &cfg.seeds {
            sequential.push(run_single(problem.as_ref(), &point, seed, &settings, None).unwrap());
        }
    }
    assert_eq!(parallel.records, sequential);
}

#[test]
fn records_and_reports_shape() {
    let cfg = small_config();
    let out = run_experiment(&cfg).unwrap();
    // (2 adam + 2*2*1 diagonal) points x 2 schedules x 5 seeds
    assert_eq!(out.records.len(), (2 + 4) * 2 * 5);
    let steps = cfg.epochs as usize * 4;
    for r in &out.records {
        assert_eq!(r.per_epoch_full_loss.len(), cfg.epochs as usize);
        assert_eq!(r.per_step_gap.as_ref().unwrap().len(), steps);
        assert_eq!(r.per_step_variance.as_ref().unwrap().len(), steps);
        assert!(r.hyperparameters.contains_key("gamma"));
    }
    assert_eq!(out.reports.len(), 1);
    let report = &out.reports[0];
    assert_eq!(report.method, "diagonal");
    assert_eq!(report.n_runs, 5);
    let s = report.s.unwrap();
    assert!((0.0..=1.0).contains(&s));
}

#[test]
fn csv_rows_match_recorded_entries() {
    let mut cfg = small_config();
    cfg.optimizers[0].gamma = Some(vec![1e-3]);
    cfg.optimizers[1] = OptimizerConfig {
        gamma: Some(vec![0.01]),
        alpha: Some(vec![0.1]),
        beta: Some(vec![0.5]),
        ..OptimizerConfig::new(Method::Diagonal)
    };
    cfg.schedules.decay_rates.clear();
    let out = run_experiment(&cfg).unwrap();
    assert_eq!(out.records.len(), 2 * 5);
    let entries: usize = out
        .records
        .iter()
        .map(|r| {
            r.per_epoch_full_loss.len()
                + r.per_step_gap.as_ref().map_or(0, Vec::len)
                + r.per_step_variance.as_ref().map_or(0, Vec::len)
        })
        .sum();
    let dir = tempfile::tempdir().unwrap();
    let manifest = emit_results(&out.records, &out.reports, dir.path()).unwrap();
    let csv = fs::read_to_string(dir.path().join("records.csv")).unwrap();
    assert_eq!(csv.lines().count() - 1, entries);
    // records.csv, records.json, reports.json + gap and variance per run
    assert_eq!(manifest.len(), 3 + 2 * 10);
    let plot = fs::read_to_string(&manifest[3]).unwrap();
    let row: Vec<&str> = plot.lines().nth(1).unwrap().split(' ').collect();
    assert_eq!(row.len(), 2);
    assert_eq!(row[0], "1");
}

#[test]
fn reports_recompute_from_serialized_records() {
    let out = run_experiment(&small_config()).unwrap();
    let back = records_from_json(&records_to_json(&out.records).unwrap()).unwrap();
    assert_eq!(compute_reports(&back).unwrap(), out.reports);
}

#[test]
fn theorem_mode_gap_decays_at_least_inverse_t() {
    let mut cfg = ExperimentConfig::new(
        ProblemConfig::Quadratic {
            dim: 5,
            kappa: 4.0,
            n_samples: 64,
            seed: 1,
        },
        vec![OptimizerConfig::new(Method::PseudoLinear)],
    );
    cfg.mode = Mode::Theorem1;
    cfg.batch_size = 16;
    cfg.epochs = 2_500;
    cfg.seeds = vec![0];
    cfg.tracking = Tracking {
        gap: true,
        variance: false,
    };
    let out = run_experiment(&cfg).unwrap();
    let plan = out.theorem1.unwrap();
    assert!(plan.setup.report.valid);
    let gap = out.records[0].per_step_gap.as_ref().unwrap();
    assert_eq!(gap.len(), 10_000);
    let series: Vec<(f64, f64)> = gap
        .iter()
        .enumerate()
        .map(|(i, &v)| ((i + 1) as f64, v))
        .collect();
    let fit = rate_fit(&series, DEFAULT_BURN_IN).unwrap();
    assert!(fit.slope <= -0.7, "slope {}", fit.slope);
}

#[test]
fn all_points_diverging_is_an_error() {
    let mut cfg = small_config();
    cfg.optimizers = vec![OptimizerConfig {
        gamma: Some(vec![1e200]),
        ..OptimizerConfig::new(Method::Sgd)
    }];
    cfg.tracking = Tracking::default();
    assert!(matches!(
        run_experiment(&cfg),
        Err(trainopt::Error::AllDiverged)
    ));
}
