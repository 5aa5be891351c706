// Small ADAM-vs-trainable-optimizer benchmark on synthetic multinomial
// logistic regression, with the relative difference and its significance.

use trainopt::harness::config::{
    DataSource, ModelConfig, OptimizerConfig, ProblemConfig, ScheduleConfig,
};
use trainopt::harness::{run_experiment, summarize_points, ExperimentConfig, Method};

pub fn run_example() -> trainopt::Result<()> {
    let mut cfg = ExperimentConfig::new(
        ProblemConfig::Classification {
            source: DataSource::Synthetic {
                n_samples: 600,
                features: 10,
                classes: 3,
                separation: 1.0,
                seed: 4,
            },
            model: ModelConfig::Logistic { lambda: 0.01 },
            standardize: false,
        },
        vec![
            OptimizerConfig {
                gamma: Some(vec![1e-3, 5e-3]),
                ..OptimizerConfig::new(Method::Adam)
            },
            OptimizerConfig {
                gamma: Some(vec![0.01, 0.05]),
                alpha: Some(vec![0.0, 0.1]),
                beta: Some(vec![0.1, 0.5]),
                ..OptimizerConfig::new(Method::Diagonal)
            },
            OptimizerConfig {
                gamma: Some(vec![0.01, 0.05]),
                alpha: Some(vec![0.01]),
                beta: Some(vec![0.1, 0.5]),
                ..OptimizerConfig::new(Method::RankOne)
            },
        ],
    );
    cfg.epochs = 10;
    cfg.schedules = ScheduleConfig {
        constant: true,
        decay_rates: vec![0.8],
    };
    let out = run_experiment(&cfg)?;

    for (method, points) in summarize_points(&out.records) {
        let best = points
            .iter()
            .filter_map(|(s, _)| s.mean_min_loss.map(|m| (m, &s.point)))
            .min_by(|a, b| a.0.total_cmp(&b.0));
        if let Some((loss, point)) = best {
            println!("{method:>9}: best mean min loss {loss:.5} at {point}");
        }
    }
    for r in &out.reports {
        println!(
            "{:>9} vs adam: rho = {:+.4}, s = {:.4}, {:?}",
            r.method,
            r.rho,
            r.s.unwrap_or(f64::NAN),
            r.verdict
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> trainopt::Result<()> {
    run_example()
}
