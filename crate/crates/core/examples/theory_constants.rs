// The boundedness constants and the step-size checks on small hand-made inputs.

use trainopt::theory::{
    compute_da_db, compute_dg, s_alpha, spectral_norm, validate_theorem1, Theorem1Config,
};
use trainopt::Matrix;

pub fn run_example() -> trainopt::Result<()> {
    let (l, d_w) = (1.0, 1.0);
    let d_g = compute_dg(l, d_w, 0.5);
    let s = s_alpha(0.1, 30.0);
    let (d_a, d_b) = compute_da_db(0.0, 0.0, s, d_w, d_g)?;
    println!("D_G = {d_g:.4}, S_alpha = {s:.6}, D_A = {d_a:.4}, D_b = {d_b:.4}");

    let base = Theorem1Config {
        gamma: 2.0,
        beta: 22.0,
        alpha: 0.1,
        mu: 30.0,
    };
    for (name, cfg) in [
        ("worked", base),
        ("gamma = 1", Theorem1Config { gamma: 1.0, ..base }),
        ("beta = 21", Theorem1Config { beta: 21.0, ..base }),
        ("mu = 22", Theorem1Config { mu: 22.0, ..base }),
    ] {
        let report = validate_theorem1(&cfg, 1.0, 1.0, 0.0, 1.0);
        let failed: Vec<&str> = report.failed.iter().map(|c| c.name()).collect();
        println!("{name:>10}: valid = {}, failed = {failed:?}", report.valid);
    }

    let m = Matrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 3.0]);
    println!(
        "spectral norm of [[3, 1], [1, 3]] = {:.10}",
        spectral_norm(&m)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> trainopt::Result<()> {
    run_example()
}
