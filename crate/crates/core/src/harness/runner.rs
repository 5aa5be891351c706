use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Mode, Theorem1Options};
use super::grid::{expand_grid, GridPoint};
use crate::metrics::{ComparisonReport, RunRecord, Tracking};
use crate::optim::{FeasibleSet, OptimizerState, Rates, Step};
use crate::problems::{BatchSampler, Problem};
use crate::theory::{
    compute_da_db, compute_dg, derive_theorem1, max_batch_grad_norm, s_alpha, validate_theorem1,
    BoundConstants, Theorem1Setup,
};
use crate::{Error, Result, Vector};

/// Per-run settings shared by every grid point of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub epochs: u64,
    pub batch_size: usize,
    pub set: FeasibleSet,
    pub tracking: Tracking,
    pub full_dim_cap: usize,
}

impl RunSettings {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        RunSettings {
            epochs: cfg.epochs,
            batch_size: cfg.batch_size,
            set: cfg.projection,
            tracking: cfg.tracking,
            full_dim_cap: cfg.full_dim_cap,
        }
    }
}

/// What an observer sees after every step.
pub struct StepView<'a> {
    /// 1-based global step index.
    pub t: u64,
    pub epoch: u64,
    /// Iterate the gradient was taken at.
    pub w: &'a Vector,
    /// Minibatch gradient `g_t`.
    pub g: &'a Vector,
    pub rates: Rates,
    pub step: &'a Step,
    /// Optimizer state after the update.
    pub state: &'a OptimizerState,
}

/// Standard-normal weights, projected onto the feasible set. Drawn from a
/// stream separate from the one the batch sampler uses.
pub fn initial_weights(d: usize, seed: u64, set: &FeasibleSet) -> Vector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let mut w = Vector::from_fn(d, |_, _| StandardNormal.sample(&mut rng));
    set.project_in_place(&mut w);
    w
}

/// Trains one grid point with one seed.
///
/// Non-finite values end the run early with `failure` set; any other error is
/// returned. The record's gap/variance entry `t` describes the iterate `w_t` the
/// `t`-th gradient was taken at.
pub fn run_single(
    problem: &dyn Problem,
    point: &GridPoint,
    seed: u64,
    settings: &RunSettings,
    mut observer: Option<&mut dyn FnMut(&StepView)>,
) -> Result<RunRecord> {
    let d = problem.dim();
    let mut state = point
        .method
        .new_state(d, point.hyper, settings.full_dim_cap)?;
    let sampler = BatchSampler::new(problem.n_samples(), settings.batch_size, seed)?;
    let mut record = RunRecord::new(point.method.name(), point.label(), seed, settings.tracking);
    record.hyperparameters = point.hyperparameters();
    record.schedule = point.gamma.label();

    let mut w = initial_weights(d, seed, &settings.set);
    let mut t = 0u64;
    'epochs: for epoch in 0..settings.epochs {
        for batch in sampler.batches(epoch) {
            t += 1;
            let rates = Rates::new(
                point.gamma.value(t, epoch)?,
                point.alpha.value(t, epoch)?,
                point.beta.value(t, epoch)?,
            );
            let g = problem.minibatch_grad(&w, &batch);
            let step = match state.step(&w, &g, rates, &settings.set) {
                Ok(s) => s,
                Err(Error::NonFinite) => {
                    record.failure = Some(format!("non-finite step at t = {t}"));
                    break 'epochs;
                }
                Err(e) => return Err(e),
            };
            record.record_step(&w, &step.ghat, problem);
            if let Some(obs) = observer.as_mut() {
                obs(&StepView {
                    t,
                    epoch,
                    w: &w,
                    g: &g,
                    rates,
                    step: &step,
                    state: &state,
                });
            }
            w = step.w;
        }
        let loss = problem.full_loss(&w);
        if !loss.is_finite() {
            record.failure = Some(format!("non-finite loss after epoch {}", epoch + 1));
            break;
        }
        record.per_epoch_full_loss.push(loss);
    }
    Ok(record)
}

/// Constants and feasible set for running under the inverse-time schedules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Plan {
    pub setup: Theorem1Setup,
    pub set: FeasibleSet,
}

/// Builds the feasible ball (radius `D_w`, default `2‖w*‖`), the bound constants
/// and a validated step-size configuration. An explicit configuration in
/// `opts` is checked; otherwise one is derived with `opts.tuning`.
pub fn theorem1_plan(
    problem: &dyn Problem,
    batch_size: usize,
    opts: &Theorem1Options,
) -> Result<Theorem1Plan> {
    let missing = || Error::Config("theorem1 mode needs a known optimum, c and L".into());
    let opt = problem.optimum().ok_or_else(missing)?;
    let c = problem.strong_convexity().ok_or_else(missing)?;
    let l = problem.lipschitz().ok_or_else(missing)?;
    let opt_norm = opt.norm();
    let d_w = opts
        .radius
        .unwrap_or(if opt_norm > 0.0 { 2.0 * opt_norm } else { 1.0 });
    if d_w < opt_norm {
        return Err(Error::Config(format!(
            "radius {d_w} excludes the optimum (norm {opt_norm})"
        )));
    }
    let d_g = compute_dg(l, d_w, max_batch_grad_norm(problem, opt, batch_size)?);
    let setup = match opts.config {
        None => derive_theorem1(c, l, d_w, d_g, opts.tuning)?,
        Some(config) => {
            let s = s_alpha(config.alpha, config.mu);
            let (d_a, d_b) = compute_da_db(0.0, 0.0, s, d_w, d_g)?;
            let report = validate_theorem1(&config, c, l, d_a, d_w);
            if !report.valid {
                let names: Vec<&str> = report
                    .failed
                    .iter()
                    .chain(&report.skipped)
                    .map(|c| c.name())
                    .collect();
                return Err(Error::Config(format!(
                    "theorem1 config fails: {}",
                    names.join(", ")
                )));
            }
            Theorem1Setup {
                config,
                constants: BoundConstants {
                    d_w,
                    d_g,
                    d_a,
                    d_b,
                    s_alpha: s,
                    l,
                    c,
                },
                report,
            }
        }
    };
    Ok(Theorem1Plan {
        setup,
        set: FeasibleSet::L2Ball { radius: d_w },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub records: Vec<RunRecord>,
    pub reports: Vec<ComparisonReport>,
    pub theorem1: Option<Theorem1Plan>,
}

/// Grid points an experiment would run, with the settings they run under.
pub fn plan_experiment(
    cfg: &ExperimentConfig,
    problem: &dyn Problem,
) -> Result<(Vec<GridPoint>, RunSettings, Option<Theorem1Plan>)> {
    let mut settings = RunSettings::from_config(cfg);
    match cfg.mode {
        Mode::Experimental => Ok((expand_grid(cfg)?, settings, None)),
        Mode::Theorem1 => {
            let mut methods: Vec<_> = cfg.optimizers.iter().map(|o| o.method).collect();
            methods.sort();
            methods.dedup();
            if methods.len() != cfg.optimizers.len() {
                return Err(Error::Config(
                    "theorem1 mode runs one point per method; list each method once".into(),
                ));
            }
            let plan = theorem1_plan(problem, cfg.batch_size, &cfg.theorem1)?;
            settings.set = plan.set;
            let points = cfg
                .optimizers
                .iter()
                .map(|o| GridPoint::theorem1(o.method, &plan.setup.config, o.hyper))
                .collect();
            Ok((points, settings, Some(plan)))
        }
    }
}

/// Runs every `(grid point, seed)` pair, in parallel, and compares each
/// method's best point against ADAM's.
///
/// Records are ordered by grid point, then by the configured seed order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let problem = cfg.build_problem()?;
    let (points, settings, theorem1) = plan_experiment(cfg, problem.as_ref())?;
    for p in &points {
        p.method
            .new_state(problem.dim(), p.hyper, settings.full_dim_cap)?;
    }
    info!(
        "running {} grid points x {} seeds",
        points.len(),
        cfg.seeds.len()
    );
    let jobs: Vec<(&GridPoint, u64)> = points
        .iter()
        .flat_map(|p| cfg.seeds.iter().map(move |&s| (p, s)))
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(p, seed)| run_single(problem.as_ref(), p, seed, &settings, None))
        .collect::<Result<Vec<_>>>()?;
    for r in records.iter().filter(|r| r.failed()) {
        warn!(
            "{} [{}] seed {}: {}",
            r.method,
            r.point,
            r.seed,
            r.failure.as_deref().unwrap_or("")
        );
    }
    let reports = compute_reports(&records)?;
    Ok(ExperimentOutput {
        records,
        reports,
        theorem1,
    })
}

/// Aggregated outcome of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub method: String,
    pub point: String,
    /// Across-seed mean of the per-run minimum epoch loss; `None` when failed.
    pub mean_min_loss: Option<f64>,
}

/// One method's grid points with the runs behind each.
pub type MethodPoints<'r> = (String, Vec<(PointSummary, Vec<&'r RunRecord>)>);

/// Grid points in first-appearance order, grouped by method.
pub fn summarize_points(records: &[RunRecord]) -> Vec<MethodPoints<'_>> {
    let mut methods: Vec<MethodPoints> = Vec::new();
    for r in records {
        let mi = match methods.iter().position(|(m, _)| *m == r.method) {
            Some(i) => i,
            None => {
                methods.push((r.method.clone(), Vec::new()));
                methods.len() - 1
            }
        };
        let points = &mut methods[mi].1;
        match points.iter_mut().find(|(s, _)| s.point == r.point) {
            Some((_, runs)) => runs.push(r),
            None => points.push((
                PointSummary {
                    method: r.method.clone(),
                    point: r.point.clone(),
                    mean_min_loss: None,
                },
                vec![r],
            )),
        }
    }
    for (_, points) in &mut methods {
        for (summary, runs) in points.iter_mut() {
            let mins: Option<Vec<f64>> = runs
                .iter()
                .map(|r| if r.failed() { None } else { r.min_loss() })
                .collect();
            summary.mean_min_loss = mins.map(|m| m.iter().sum::<f64>() / m.len() as f64);
        }
    }
    methods
}

/// Best-point selection and comparison against ADAM, as a pure function of the
/// records. A point is excluded when any of its runs failed; the best point
/// minimizes the across-seed mean of the minimum epoch loss (first wins ties).
///
/// Returns no reports when ADAM is absent or fully diverged; errors when every
/// point of every method diverged.
pub fn compute_reports(records: &[RunRecord]) -> Result<Vec<ComparisonReport>> {
    let grouped = summarize_points(records);
    if !grouped.is_empty()
        && grouped
            .iter()
            .all(|(_, pts)| pts.iter().all(|(s, _)| s.mean_min_loss.is_none()))
    {
        return Err(Error::AllDiverged);
    }
    type Best<'r> = (&'r PointSummary, &'r [&'r RunRecord]);
    let best = |pts: &'_ [(PointSummary, Vec<&'_ RunRecord>)]| -> Option<(usize, f64)> {
        pts.iter()
            .enumerate()
            .filter_map(|(i, (s, _))| s.mean_min_loss.map(|m| (i, m)))
            .fold(None, |acc: Option<(usize, f64)>, (i, m)| match acc {
                Some((_, bm)) if bm <= m => acc,
                _ => Some((i, m)),
            })
    };
    let Some((_, adam_points)) = grouped.iter().find(|(m, _)| m == "adam") else {
        return Ok(Vec::new());
    };
    let Some((ai, _)) = best(adam_points) else {
        warn!("every ADAM grid point diverged; no comparison possible");
        return Ok(Vec::new());
    };
    let adam_best: Best = (&adam_points[ai].0, &adam_points[ai].1);

    let mut reports = Vec::new();
    for (method, points) in grouped.iter().filter(|(m, _)| m != "adam") {
        let failed_points: Vec<String> = points
            .iter()
            .filter(|(s, _)| s.mean_min_loss.is_none())
            .map(|(s, _)| s.point.clone())
            .collect();
        let Some((bi, _)) = best(points) else {
            warn!("every {method} grid point diverged; skipping its comparison");
            continue;
        };
        let adam_runs: Vec<RunRecord> = adam_best.1.iter().map(|r| (*r).clone()).collect();
        let method_runs: Vec<RunRecord> = points[bi].1.iter().map(|r| (*r).clone()).collect();
        let mut report = ComparisonReport::compare(&adam_runs, &method_runs)?;
        report.failed_points = failed_points;
        reports.push(report);
    }
    Ok(reports)
}
