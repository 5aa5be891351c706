use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Dataset, Provenance};
use crate::problems::QuadraticSpec;
use crate::{Error, Matrix, Result, Vector};

fn normal_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    // Fill row by row so the draw order does not depend on nalgebra's storage.
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = StandardNormal.sample(rng);
        }
    }
    m
}

/// Random quadratic with `H = Q·diag(λ)·Qᵀ`, `Q` a random orthogonal basis.
///
/// The spectrum always contains `1` and `κ` (for `d ≥ 2`); the remaining
/// eigenvalues are log-uniform in `[1, κ]`, so `c = 1` and `L = κ` exactly. `w*`
/// and the per-sample noise are standard normal, the noise re-centred to sum to
/// zero.
pub fn gen_quadratic(d: usize, kappa: f64, n: usize, seed: u64) -> Result<QuadraticSpec> {
    if d < 1 || !(kappa >= 1.0 && kappa.is_finite()) || n < 2 {
        return Err(Error::invalid(format!(
            "gen_quadratic needs d >= 1, finite kappa >= 1, N >= 2 (got d = {d}, kappa = {kappa}, N = {n})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_k = kappa.ln();
    let eig: Vec<f64> = (0..d)
        .map(|i| {
            if i == 0 {
                1.0
            } else if i == d - 1 {
                kappa
            } else {
                (rng.random::<f64>() * log_k).exp()
            }
        })
        .collect();
    let q = normal_matrix(&mut rng, d, d).qr().q();
    let h = &q * Matrix::from_diagonal(&Vector::from_vec(eig)) * q.transpose();
    let h = (&h + h.transpose()) * 0.5;
    let optimum = Vector::from_fn(d, |_, _| StandardNormal.sample(&mut rng));
    let noise = normal_matrix(&mut rng, n, d);
    Ok(QuadraticSpec::new(h, optimum, noise)?.with_bounds(1.0, kappa))
}

/// `K` Gaussian clusters in `ℝ^p`. Centres are standard normal scaled by
/// `separation`; sample `i` belongs to cluster `i mod K` and is its centre plus
/// unit Gaussian noise.
pub fn gen_logistic(n: usize, p: usize, k: usize, separation: f64, seed: u64) -> Result<Dataset> {
    if k < 2 || n < k || p == 0 {
        return Err(Error::invalid(format!(
            "gen_logistic needs N >= K >= 2 and p >= 1 (got N = {n}, p = {p}, K = {k})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centres = normal_matrix(&mut rng, k, p) * separation;
    let y: Vec<usize> = (0..n).map(|i| i % k).collect();
    let noise = normal_matrix(&mut rng, n, p);
    let x = Matrix::from_fn(n, p, |i, j| centres[(y[i], j)] + noise[(i, j)]);
    Ok(Dataset {
        x,
        y,
        name: format!("gaussian_clusters_n{n}_p{p}_k{k}"),
        provenance: Provenance::Synthetic { seed },
    })
}
