// Inverse-time schedules on a generated quadratic: derive constants that
// satisfy every step-size hypothesis, run the projected pseudo-linear optimizer
// and plain SGD, and fit the decay rates of the gap and the gradient error.

use trainopt::data::gen_quadratic;
use trainopt::harness::config::Theorem1Options;
use trainopt::harness::{run_single, theorem1_plan, GridPoint, Method, RunSettings};
use trainopt::metrics::Tracking;
use trainopt::optim::BaselineHyper;
use trainopt::theory::{rate_fit, DEFAULT_BURN_IN};

fn fit(values: &[f64]) -> trainopt::Result<f64> {
    let series: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| ((i + 1) as f64, v))
        .collect();
    Ok(rate_fit(&series, DEFAULT_BURN_IN)?.slope)
}

pub fn run_example() -> trainopt::Result<()> {
    let problem = gen_quadratic(10, 10.0, 256, 0)?;
    let plan = theorem1_plan(&problem, 64, &Theorem1Options::default())?;
    let (cfg, k) = (plan.setup.config, plan.setup.constants);
    println!(
        "gamma {:.3}  beta {:.1}  alpha {:.3}  mu {:.0}",
        cfg.gamma, cfg.beta, cfg.alpha, cfg.mu
    );
    println!(
        "D_w {:.3}  D_G {:.3}  D_A {:.4}  D_b {:.3}",
        k.d_w, k.d_g, k.d_a, k.d_b
    );

    let settings = RunSettings {
        epochs: 5_000,
        batch_size: 64,
        set: plan.set,
        tracking: Tracking {
            gap: true,
            variance: true,
        },
        full_dim_cap: 4096,
    };
    for method in [Method::PseudoLinear, Method::Sgd] {
        let point = GridPoint::theorem1(method, &cfg, BaselineHyper::default());
        let r = run_single(&problem, &point, 1, &settings, None)?;
        let gap = r.per_step_gap.as_deref().unwrap();
        let var = r.per_step_variance.as_deref().unwrap();
        println!(
            "{:>14}: gap slope {:+.3}, error slope {:+.3}, final gap {:.3e}, final error {:.3e}",
            r.method,
            fit(gap)?,
            fit(var)?,
            gap.last().unwrap(),
            var.last().unwrap()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> trainopt::Result<()> {
    run_example()
}
