// Full harness round trip from a JSON config: expand the grid, run every
// (point, seed) pair, write the result files and recompute the reports from
// the written records.
//
// `cargo run --example grid_experiment -- <out_dir>`

use trainopt::harness::{
    compute_reports, emit_results, expand_grid, run_experiment, ExperimentConfig,
};
use trainopt::metrics::records_from_json;

const CONFIG: &str = r#"{
  "problem": { "kind": "quadratic", "dim": 8, "kappa": 20.0, "n_samples": 128, "seed": 3 },
  "optimizers": [
    { "method": "adam", "gamma": [0.001, 0.01] },
    { "method": "pseudo_linear", "gamma": [0.01, 0.05], "alpha": [0.0, 0.01], "beta": [0.5] },
    { "method": "sgd", "gamma": [0.01, 0.05] }
  ],
  "schedules": { "constant": true, "decay_rates": [0.95] },
  "epochs": 20,
  "batch_size": 16,
  "seeds": [0, 1, 2],
  "tracking": { "gap": true, "variance": false }
}"#;

pub fn run_example(out_dir: Option<std::path::PathBuf>) -> trainopt::Result<()> {
    let cfg = ExperimentConfig::from_json(CONFIG)?;
    println!(
        "{} grid points x {} seeds",
        expand_grid(&cfg)?.len(),
        cfg.seeds.len()
    );
    let out = run_experiment(&cfg)?;

    let keep = out_dir.is_some();
    let out_dir = out_dir.unwrap_or_else(|| {
        std::env::temp_dir().join(format!("trainopt-grid-{}", std::process::id()))
    });
    let manifest = emit_results(&out.records, &out.reports, &out_dir)?;
    println!("wrote {} files under {}", manifest.len(), out_dir.display());

    let text = std::fs::read_to_string(out_dir.join("records.json"))
        .map_err(|e| trainopt::Error::Config(e.to_string()))?;
    let again = compute_reports(&records_from_json(&text)?)?;
    for r in &again {
        println!(
            "{:>14} vs adam: rho = {:+.4}, s = {:.4}",
            r.method,
            r.rho,
            r.s.unwrap_or(f64::NAN)
        );
    }
    println!("reports reproduced from disk: {}", again == out.reports);
    if !keep {
        let _ = std::fs::remove_dir_all(&out_dir);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> trainopt::Result<()> {
    run_example(std::env::args().nth(1).map(Into::into))
}
