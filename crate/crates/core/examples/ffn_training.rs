// Two-layer ReLU network trained with the rank-one optimizer and with ADAM.

use trainopt::data::{gen_logistic, standardize};
use trainopt::harness::{run_single, GridPoint, Method, RunSettings};
use trainopt::metrics::Tracking;
use trainopt::optim::{BaselineHyper, FeasibleSet, Schedule};
use trainopt::problems::FfnSpec;

pub fn run_example() -> trainopt::Result<()> {
    let ds = standardize(&gen_logistic(400, 8, 3, 1.5, 9)?);
    let problem = FfnSpec::from_dataset(&ds, FfnSpec::DEFAULT_HIDDEN)?;
    let settings = RunSettings {
        epochs: 15,
        batch_size: 64,
        set: FeasibleSet::Unconstrained,
        tracking: Tracking::default(),
        full_dim_cap: 4096,
    };
    let points = [
        GridPoint::new(
            Method::RankOne,
            Schedule::ExpDecay {
                base: 0.05,
                rate: 0.95,
            },
            Schedule::constant(0.01),
            Schedule::constant(0.5),
            BaselineHyper::default(),
        ),
        GridPoint::new(
            Method::Adam,
            Schedule::constant(5e-3),
            Schedule::constant(0.0),
            Schedule::constant(0.0),
            BaselineHyper::default(),
        ),
    ];
    for point in &points {
        let r = run_single(&problem, point, 0, &settings, None)?;
        let losses: Vec<String> = r
            .per_epoch_full_loss
            .iter()
            .step_by(3)
            .map(|l| format!("{l:.4}"))
            .collect();
        println!("{:>8}: {}", r.method, losses.join(" "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> trainopt::Result<()> {
    run_example()
}
