// Choosing the L2 penalty on a held-out split. The split ratio is the caller's
// choice; here 80/20 after a seeded shuffle.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trainopt::data::{gen_logistic, Dataset};
use trainopt::harness::{run_single, GridPoint, Method, RunSettings, StepView};
use trainopt::metrics::Tracking;
use trainopt::optim::{BaselineHyper, FeasibleSet, Schedule};
use trainopt::problems::{LogisticSpec, Problem};
use trainopt::Matrix;

const TRAIN_FRACTION: f64 = 0.8;

fn subset(ds: &Dataset, rows: &[usize]) -> (Matrix, Vec<usize>) {
    let x = Matrix::from_fn(rows.len(), ds.n_features(), |i, j| ds.x[(rows[i], j)]);
    (x, rows.iter().map(|&r| ds.y[r]).collect())
}

pub fn run_example() -> trainopt::Result<()> {
    let ds = gen_logistic(500, 15, 3, 0.6, 21)?;
    let mut rows: Vec<usize> = (0..ds.n_samples()).collect();
    rows.shuffle(&mut ChaCha8Rng::seed_from_u64(0));
    let cut = (rows.len() as f64 * TRAIN_FRACTION) as usize;
    let (train_x, train_y) = subset(&ds, &rows[..cut]);
    let (val_x, val_y) = subset(&ds, &rows[cut..]);
    let classes = ds.n_classes();
    // Validation loss is measured without the penalty.
    let validation = LogisticSpec::new(val_x, val_y, classes, 0.0)?;

    let settings = RunSettings {
        epochs: 20,
        batch_size: 64,
        set: FeasibleSet::Unconstrained,
        tracking: Tracking::default(),
        full_dim_cap: 4096,
    };
    let point = GridPoint::new(
        Method::Diagonal,
        Schedule::ExpDecay {
            base: 0.05,
            rate: 0.95,
        },
        Schedule::constant(0.01),
        Schedule::constant(0.5),
        BaselineHyper::default(),
    );
    let mut best = (f64::INFINITY, 0.0);
    for lambda in [0.0, 1e-4, 1e-3, 1e-2, 1e-1] {
        let train = LogisticSpec::new(train_x.clone(), train_y.clone(), classes, lambda)?;
        let mut w = None;
        let mut keep = |v: &StepView| w = Some(v.step.w.clone());
        run_single(&train, &point, 0, &settings, Some(&mut keep))?;
        let val_loss = validation.full_loss(&w.unwrap());
        println!("lambda {lambda:<7}: validation loss {val_loss:.5}");
        if val_loss < best.0 {
            best = (val_loss, lambda);
        }
    }
    println!("selected lambda = {}", best.1);
    Ok(())
}

#[allow(dead_code)]
fn main() -> trainopt::Result<()> {
    run_example()
}
