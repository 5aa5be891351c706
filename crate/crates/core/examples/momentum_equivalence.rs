// A pseudo-linear optimizer with `α = 0` and constant `β` reproduces heavy-ball
// momentum with `β₁ = 1 − β`, step for step.

use trainopt::data::gen_logistic;
use trainopt::harness::{run_single, GridPoint, Method, RunSettings, StepView};
use trainopt::metrics::Tracking;
use trainopt::optim::{BaselineHyper, FeasibleSet, Schedule};
use trainopt::problems::LogisticSpec;

pub fn run_example() -> trainopt::Result<()> {
    let ds = gen_logistic(200, 10, 2, 1.0, 42)?;
    let problem = LogisticSpec::from_dataset(&ds, 0.01)?;
    let settings = RunSettings {
        epochs: 50,
        batch_size: 64,
        set: FeasibleSet::Unconstrained,
        tracking: Tracking::default(),
        full_dim_cap: 4096,
    };
    let hyper = BaselineHyper {
        beta1: 0.9,
        ..BaselineHyper::default()
    };
    let point = |method, beta| {
        GridPoint::new(
            method,
            Schedule::constant(0.1),
            Schedule::constant(0.0),
            Schedule::constant(beta),
            hyper,
        )
    };

    let mut trajectories = Vec::new();
    for p in [
        point(Method::PseudoLinear, 0.1),
        point(Method::Momentum, 0.0),
    ] {
        let mut ws = Vec::new();
        let mut keep = |v: &StepView| ws.push(v.step.w.clone());
        let record = run_single(&problem, &p, 7, &settings, Some(&mut keep))?;
        println!(
            "{:>14}: final loss {:.6}",
            record.method,
            record.per_epoch_full_loss.last().unwrap()
        );
        trajectories.push(ws);
    }
    let max_gap = trajectories[0]
        .iter()
        .zip(&trajectories[1])
        .map(|(a, b)| (a - b).amax())
        .fold(0.0, f64::max);
    println!(
        "{} steps, largest coordinate difference {max_gap:.2e}",
        trajectories[0].len()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> trainopt::Result<()> {
    run_example()
}
