use super::{log_sum_exp, Problem};
use crate::data::Dataset;
use crate::{Error, Matrix, Result, Vector};

/// Multinomial logistic regression with an L2 penalty.
///
/// Parameters are a `K × p` weight matrix flattened row by row (class-major),
/// so `d = K·p`; there is no separate intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticSpec {
    /// Features stored transposed (`p × N`) so each sample is a contiguous column.
    xt: Matrix,
    y: Vec<usize>,
    classes: usize,
    lambda: f64,
    lipschitz: f64,
}

impl LogisticSpec {
    pub fn new(x: Matrix, y: Vec<usize>, classes: usize, lambda: f64) -> Result<Self> {
        if x.nrows() != y.len() || y.is_empty() {
            return Err(Error::invalid(format!(
                "need one label per row and at least one row (rows {}, labels {})",
                x.nrows(),
                y.len()
            )));
        }
        if classes < 2 || y.iter().any(|&c| c >= classes) {
            return Err(Error::invalid(format!(
                "labels must lie in [0, {classes}) with at least 2 classes"
            )));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::invalid(format!(
                "lambda must be finite and >= 0, got {lambda}"
            )));
        }
        let x_norm = crate::theory::spectral_norm(&x).map_err(|e| Error::invalid(e.to_string()))?;
        let lipschitz = lambda + x_norm * x_norm / (2.0 * x.nrows() as f64);
        Ok(LogisticSpec {
            xt: x.transpose(),
            y,
            classes,
            lambda,
            lipschitz,
        })
    }

    pub fn from_dataset(ds: &Dataset, lambda: f64) -> Result<Self> {
        Self::new(ds.x.clone(), ds.y.clone(), ds.n_classes(), lambda)
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn features(&self) -> usize {
        self.xt.nrows()
    }

    /// Same data, different penalty.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.xt.transpose(), self.y.clone(), self.classes, lambda)
    }

    /// Index of the largest logit for sample `n`.
    pub fn predict(&self, w: &Vector, n: usize) -> usize {
        let logits = self.logits(w, n);
        logits
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, &z)| {
                if z > best.1 {
                    (k, z)
                } else {
                    best
                }
            })
            .0
    }

    pub fn accuracy(&self, w: &Vector) -> f64 {
        let hits = (0..self.y.len())
            .filter(|&n| self.predict(w, n) == self.y[n])
            .count();
        hits as f64 / self.y.len() as f64
    }

    fn sample(&self, n: usize) -> &[f64] {
        let p = self.xt.nrows();
        &self.xt.as_slice()[n * p..(n + 1) * p]
    }

    fn logits(&self, w: &Vector, n: usize) -> Vec<f64> {
        let p = self.xt.nrows();
        let x = self.sample(n);
        w.as_slice()
            .chunks_exact(p)
            .map(|wk| wk.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl Problem for LogisticSpec {
    fn dim(&self) -> usize {
        self.classes * self.xt.nrows()
    }

    fn n_samples(&self) -> usize {
        self.y.len()
    }

    fn batch_loss_grad(&self, w: &Vector, batch: &[usize]) -> (f64, Vector) {
        let p = self.xt.nrows();
        let mut grad = Vector::zeros(self.dim());
        let mut loss = 0.0;
        for &n in batch {
            let z = self.logits(w, n);
            let lse = log_sum_exp(&z);
            loss += lse - z[self.y[n]];
            let x = self.sample(n);
            for ((k, zk), gk) in z
                .iter()
                .enumerate()
                .zip(grad.as_mut_slice().chunks_exact_mut(p))
            {
                let coef = (zk - lse).exp() - if k == self.y[n] { 1.0 } else { 0.0 };
                for (g, xj) in gk.iter_mut().zip(x) {
                    *g += coef * xj;
                }
            }
        }
        let m = batch.len().max(1) as f64;
        loss /= m;
        grad /= m;
        if self.lambda > 0.0 {
            loss += 0.5 * self.lambda * w.norm_squared();
            grad.axpy(self.lambda, w, 1.0);
        }
        (loss, grad)
    }

    fn full_loss(&self, w: &Vector) -> f64 {
        let data: f64 = (0..self.y.len())
            .map(|n| {
                let z = self.logits(w, n);
                log_sum_exp(&z) - z[self.y[n]]
            })
            .sum();
        data / self.y.len() as f64 + 0.5 * self.lambda * w.norm_squared()
    }

    fn strong_convexity(&self) -> Option<f64> {
        (self.lambda > 0.0).then_some(self.lambda)
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(self.lipschitz)
    }
}
