use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use trainopt::harness::{self, ExperimentConfig, Mode};
use trainopt::metrics::{records_from_json, reports_to_json};
use trainopt::Error;

#[derive(Parser)]
#[command(name = "trainopt", version, about = "Trainable optimizer experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its results.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Record the per-step approximation variance.
        #[arg(long)]
        track_variance: bool,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
    },
    /// Check a config (and, in theorem1 mode, the step-size conditions) without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Recompute the comparison reports from a records.json file.
    Report {
        #[arg(long)]
        records: PathBuf,
    },
}

/// 1 for bad input, 2 for failures while running or writing.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::AllDiverged | Error::Io { .. } | Error::NonFinite | Error::NoConvergence { .. } => 2,
        _ => 1,
    }
}

fn load_config(path: &Path) -> Result<ExperimentConfig, Error> {
    let cfg = ExperimentConfig::load(path).map_err(|e| match e {
        Error::Io { path, source } => Error::Config(format!("{}: {source}", path.display())),
        other => other,
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Run {
            config,
            out_dir,
            mode,
            track_variance,
            seeds,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(dir) = out_dir {
                cfg.out_dir = dir;
            }
            if let Some(mode) = mode {
                cfg.mode = mode;
            }
            if track_variance {
                cfg.tracking.variance = true;
            }
            if let Some(seeds) = seeds {
                cfg.seeds = seeds;
            }
            let out = harness::run_experiment(&cfg)?;
            let mut manifest = harness::emit_results(&out.records, &out.reports, &cfg.out_dir)?;
            if let Some(plan) = &out.theorem1 {
                let path = cfg.out_dir.join("theorem1.json");
                std::fs::write(&path, serde_json::to_string_pretty(plan)?).map_err(|e| {
                    Error::Io {
                        path: path.clone(),
                        source: e,
                    }
                })?;
                manifest.push(path);
            }
            for path in &manifest {
                println!("{}", path.display());
            }
            for r in &out.reports {
                let s = r.s.map_or("-".to_string(), |s| format!("{s:.4}"));
                eprintln!(
                    "{} vs adam: rho = {:.6}, s = {s}, {:?}",
                    r.method, r.rho, r.verdict
                );
            }
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            let problem = cfg.build_problem()?;
            let (points, _, plan) = harness::plan_experiment(&cfg, problem.as_ref())?;
            println!(
                "config ok: {} grid points x {} seeds",
                points.len(),
                cfg.seeds.len()
            );
            if let Some(plan) = plan {
                println!("{}", serde_json::to_string_pretty(&plan)?);
            }
        }
        Command::Report { records } => {
            let text = std::fs::read_to_string(&records).map_err(|e| Error::Io {
                path: records.clone(),
                source: e,
            })?;
            let recs = records_from_json(&text)?;
            println!("{}", reports_to_json(&harness::compute_reports(&recs)?)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
