// LIBSVM and CSV ingestion: write a dataset out in both formats, read it back,
// standardize and fit a logistic model.

use std::fmt::Write as _;

use trainopt::data::{gen_logistic, load_csv, load_libsvm, standardize, write_libsvm};
use trainopt::harness::{run_single, GridPoint, Method, RunSettings};
use trainopt::metrics::Tracking;
use trainopt::optim::{BaselineHyper, FeasibleSet, Schedule};
use trainopt::problems::LogisticSpec;

pub fn run_example() -> trainopt::Result<()> {
    let dir = std::env::temp_dir().join(format!("trainopt-load-datasets-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| trainopt::Error::Config(e.to_string()))?;
    let ds = gen_logistic(300, 5, 2, 2.0, 1)?;

    let libsvm_path = dir.join("train.libsvm");
    write_libsvm(&ds, &libsvm_path)?;
    let from_libsvm = load_libsvm(&libsvm_path)?;

    let mut csv = String::from("f0,f1,f2,f3,f4,label\n");
    for n in 0..ds.n_samples() {
        for j in 0..ds.n_features() {
            write!(csv, "{},", ds.x[(n, j)]).unwrap();
        }
        writeln!(csv, "{}", if ds.y[n] == 0 { "neg" } else { "pos" }).unwrap();
    }
    let csv_path = dir.join("train.csv");
    std::fs::write(&csv_path, csv).map_err(|e| trainopt::Error::Config(e.to_string()))?;
    let from_csv = load_csv(&csv_path, 5)?;
    println!(
        "libsvm: {} x {} ({} classes); csv: {} x {}; labels agree: {}",
        from_libsvm.n_samples(),
        from_libsvm.n_features(),
        from_libsvm.n_classes(),
        from_csv.n_samples(),
        from_csv.n_features(),
        from_libsvm.y == from_csv.y
    );

    let problem = LogisticSpec::from_dataset(&standardize(&from_csv), 1e-3)?;
    let settings = RunSettings {
        epochs: 10,
        batch_size: 32,
        set: FeasibleSet::Unconstrained,
        tracking: Tracking::default(),
        full_dim_cap: 4096,
    };
    let point = GridPoint::new(
        Method::Diagonal,
        Schedule::constant(0.05),
        Schedule::constant(0.1),
        Schedule::constant(0.5),
        BaselineHyper::default(),
    );
    let mut last = None;
    let mut keep = |v: &trainopt::harness::StepView| last = Some(v.step.w.clone());
    let r = run_single(&problem, &point, 0, &settings, Some(&mut keep))?;
    println!(
        "diagonal TO: final loss {:.4}, training accuracy {:.3}",
        r.per_epoch_full_loss.last().unwrap(),
        problem.accuracy(&last.unwrap())
    );
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}

#[allow(dead_code)]
fn main() -> trainopt::Result<()> {
    run_example()
}
