use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{log_sum_exp, Problem};
use crate::data::Dataset;
use crate::{Error, Matrix, Result, Vector};

/// Two fully connected layers, `p → hidden → K`, ReLU in between, softmax
/// cross-entropy on top.
///
/// Flattened parameter layout: `W1` (`hidden × p`, row-major), `b1`, `W2`
/// (`K × hidden`, row-major), `b2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FfnSpec {
    x: Matrix,
    y: Vec<usize>,
    classes: usize,
    hidden: usize,
}

struct Layout {
    p: usize,
    h: usize,
    k: usize,
}

impl Layout {
    fn w1(&self, i: usize, j: usize) -> usize {
        i * self.p + j
    }
    fn b1(&self, i: usize) -> usize {
        self.h * self.p + i
    }
    fn w2(&self, k: usize, i: usize) -> usize {
        self.h * self.p + self.h + k * self.h + i
    }
    fn b2(&self, k: usize) -> usize {
        self.h * self.p + self.h + self.k * self.h + k
    }
    fn len(&self) -> usize {
        self.h * self.p + self.h + self.k * self.h + self.k
    }
}

impl FfnSpec {
    pub const DEFAULT_HIDDEN: usize = 10;

    pub fn new(x: Matrix, y: Vec<usize>, classes: usize, hidden: usize) -> Result<Self> {
        if x.nrows() != y.len() || y.is_empty() {
            return Err(Error::invalid(
                "need one label per row and at least one row",
            ));
        }
        if classes < 2 || y.iter().any(|&c| c >= classes) {
            return Err(Error::invalid(format!(
                "labels must lie in [0, {classes}) with at least 2 classes"
            )));
        }
        if hidden == 0 {
            return Err(Error::invalid("hidden layer must have at least one unit"));
        }
        Ok(FfnSpec {
            x,
            y,
            classes,
            hidden,
        })
    }

    pub fn from_dataset(ds: &Dataset, hidden: usize) -> Result<Self> {
        Self::new(ds.x.clone(), ds.y.clone(), ds.n_classes(), hidden)
    }

    fn layout(&self) -> Layout {
        Layout {
            p: self.x.ncols(),
            h: self.hidden,
            k: self.classes,
        }
    }

    /// Standard-normal weights and biases.
    pub fn init_weights(&self, seed: u64) -> Vector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Vector::from_fn(self.dim(), |_, _| StandardNormal.sample(&mut rng))
    }
}

impl Problem for FfnSpec {
    fn dim(&self) -> usize {
        self.layout().len()
    }

    fn n_samples(&self) -> usize {
        self.y.len()
    }

    fn batch_loss_grad(&self, w: &Vector, batch: &[usize]) -> (f64, Vector) {
        let lay = self.layout();
        let mut grad = Vector::zeros(lay.len());
        let mut loss = 0.0;
        let mut pre = vec![0.0; lay.h];
        let mut act = vec![0.0; lay.h];
        let mut logits = vec![0.0; lay.k];
        for &n in batch {
            for i in 0..lay.h {
                let mut s = w[lay.b1(i)];
                for j in 0..lay.p {
                    s += w[lay.w1(i, j)] * self.x[(n, j)];
                }
                pre[i] = s;
                act[i] = s.max(0.0);
            }
            for (k, z) in logits.iter_mut().enumerate() {
                let mut s = w[lay.b2(k)];
                for i in 0..lay.h {
                    s += w[lay.w2(k, i)] * act[i];
                }
                *z = s;
            }
            let lse = log_sum_exp(&logits);
            loss += lse - logits[self.y[n]];

            let mut back = vec![0.0; lay.h];
            for (k, z) in logits.iter().enumerate() {
                let dz = (z - lse).exp() - if k == self.y[n] { 1.0 } else { 0.0 };
                grad[lay.b2(k)] += dz;
                for i in 0..lay.h {
                    grad[lay.w2(k, i)] += dz * act[i];
                    back[i] += dz * w[lay.w2(k, i)];
                }
            }
            for i in 0..lay.h {
                if pre[i] <= 0.0 {
                    continue;
                }
                grad[lay.b1(i)] += back[i];
                for j in 0..lay.p {
                    grad[lay.w1(i, j)] += back[i] * self.x[(n, j)];
                }
            }
        }
        let m = batch.len().max(1) as f64;
        (loss / m, grad / m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> FfnSpec {
        let x = Matrix::from_row_slice(4, 2, &[0.5, -1.0, 1.2, 0.3, -0.7, 0.8, 0.0, 2.0]);
        FfnSpec::new(x, vec![0, 1, 1, 0], 2, 3).unwrap()
    }

    #[test]
    fn dimension() {
        assert_eq!(tiny().dim(), 3 * 2 + 3 + 2 * 3 + 2);
    }

    #[test]
    fn zero_weights_give_log_k() {
        let f = tiny();
        assert!((f.full_loss(&Vector::zeros(f.dim())) - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn duplicate_sample_doubles_its_weight() {
        let f = tiny();
        let w = f.init_weights(5);
        let g0 = f.minibatch_grad(&w, &[0]);
        let g1 = f.minibatch_grad(&w, &[1]);
        let dup = f.minibatch_grad(&w, &[0, 0, 1]);
        let expect = (g0 * 2.0 + g1) / 3.0;
        assert!((dup - expect).amax() < 1e-14);
    }
}
