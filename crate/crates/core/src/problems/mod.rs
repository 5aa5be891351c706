//! Loss and gradient oracles over a finite sum `F(w) = (1/N) Σ f_n(w)`.

mod ffn;
mod logistic;
mod quadratic;
mod sampler;

pub use ffn::FfnSpec;
pub use logistic::LogisticSpec;
pub use quadratic::QuadraticSpec;
pub use sampler::BatchSampler;

use crate::Vector;

/// Finite-sum objective.
///
/// Batch indices passed to the oracle must lie in `0..n_samples()`; out-of-range
/// indices panic.
pub trait Problem: Send + Sync {
    fn dim(&self) -> usize;

    fn n_samples(&self) -> usize;

    /// Mean loss and its gradient over `batch` (duplicates count with multiplicity).
    fn batch_loss_grad(&self, w: &Vector, batch: &[usize]) -> (f64, Vector);

    fn minibatch_grad(&self, w: &Vector, batch: &[usize]) -> Vector {
        self.batch_loss_grad(w, batch).1
    }

    fn full_loss(&self, w: &Vector) -> f64 {
        self.batch_loss_grad(w, &all_indices(self.n_samples())).0
    }

    fn full_grad(&self, w: &Vector) -> Vector {
        self.batch_loss_grad(w, &all_indices(self.n_samples())).1
    }

    /// Known minimizer `w*`, when available in closed form.
    fn optimum(&self) -> Option<&Vector> {
        None
    }

    /// Strong-convexity constant `c`.
    fn strong_convexity(&self) -> Option<f64> {
        None
    }

    /// Lipschitz constant `L` of the (minibatch) gradients.
    fn lipschitz(&self) -> Option<f64> {
        None
    }
}

pub(crate) fn all_indices(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Numerically stable `ln Σ exp(z_k)`.
pub(crate) fn log_sum_exp(z: &[f64]) -> f64 {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}
