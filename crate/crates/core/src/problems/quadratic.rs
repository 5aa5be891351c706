use nalgebra::SymmetricEigen;

use super::Problem;
use crate::error::check_dim;
use crate::{Error, Matrix, Result, Vector};

/// Strongly convex quadratic with a closed-form optimum.
///
/// Sample `n` contributes `f_n(w) = ½(w−w*)ᵀH(w−w*) − ξ_nᵀ(w−w*)` with the noise
/// vectors `ξ_n` centred to sum to zero, so `∇F(w) = H(w − w*)` and `w*` minimizes
/// `F` while every minibatch gradient is noisy.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSpec {
    h: Matrix,
    optimum: Vector,
    /// One row per sample.
    noise: Matrix,
    c: f64,
    l: f64,
}

impl QuadraticSpec {
    /// Builds the problem, centring `noise` and reading `c`, `L` off the spectrum of `h`.
    pub fn new(h: Matrix, optimum: Vector, noise: Matrix) -> Result<Self> {
        let d = optimum.len();
        check_dim(d, h.nrows())?;
        check_dim(d, h.ncols())?;
        check_dim(d, noise.ncols())?;
        if noise.nrows() == 0 {
            return Err(Error::invalid(
                "quadratic problem needs at least one sample",
            ));
        }
        if (&h - h.transpose()).amax() > 1e-12 * h.amax().max(1.0) {
            return Err(Error::invalid("Hessian must be symmetric"));
        }
        let eig = SymmetricEigen::new(h.clone()).eigenvalues;
        let c = eig.min();
        let l = eig.max();
        if !(c > 0.0) {
            return Err(Error::invalid(format!(
                "Hessian must be positive definite (min eigenvalue {c})"
            )));
        }
        let mean = noise.row_mean();
        let noise = Matrix::from_fn(noise.nrows(), d, |n, j| noise[(n, j)] - mean[j]);
        Ok(QuadraticSpec {
            h,
            optimum,
            noise,
            c,
            l,
        })
    }

    /// Overrides the spectral bounds with known exact values (`c ≤ λ_min`, `L ≥ λ_max`).
    pub fn with_bounds(mut self, c: f64, l: f64) -> Self {
        self.c = c;
        self.l = l;
        self
    }

    pub fn hessian(&self) -> &Matrix {
        &self.h
    }

    pub fn noise(&self) -> &Matrix {
        &self.noise
    }

    /// `H·(w − w*)`.
    pub fn full_grad_closed_form(&self, w: &Vector) -> Vector {
        &self.h * (w - &self.optimum)
    }

    /// Gradient of the single term `f_n`.
    pub fn sample_grad(&self, w: &Vector, n: usize) -> Vector {
        self.full_grad_closed_form(w) - self.noise.row(n).transpose()
    }
}

impl Problem for QuadraticSpec {
    fn dim(&self) -> usize {
        self.optimum.len()
    }

    fn n_samples(&self) -> usize {
        self.noise.nrows()
    }

    fn batch_loss_grad(&self, w: &Vector, batch: &[usize]) -> (f64, Vector) {
        let e = w - &self.optimum;
        let he = &self.h * &e;
        let d = e.len();
        let mut mean_noise = Vector::zeros(d);
        for &n in batch {
            for j in 0..d {
                mean_noise[j] += self.noise[(n, j)];
            }
        }
        mean_noise /= batch.len().max(1) as f64;
        let loss = 0.5 * e.dot(&he) - mean_noise.dot(&e);
        (loss, he - mean_noise)
    }

    fn full_loss(&self, w: &Vector) -> f64 {
        let e = w - &self.optimum;
        0.5 * e.dot(&(&self.h * &e))
    }

    fn full_grad(&self, w: &Vector) -> Vector {
        self.full_grad_closed_form(w)
    }

    fn optimum(&self) -> Option<&Vector> {
        Some(&self.optimum)
    }

    fn strong_convexity(&self) -> Option<f64> {
        Some(self.c)
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(self.l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::all_indices;

    fn small() -> QuadraticSpec {
        let h = Matrix::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.5, 3.0, 0.2, 0.0, 0.2, 1.5]);
        let opt = Vector::from_column_slice(&[1.0, -2.0, 0.5]);
        let noise = Matrix::from_fn(5, 3, |n, j| ((n * 3 + j) as f64 * 1.3).sin());
        QuadraticSpec::new(h, opt, noise).unwrap()
    }

    #[test]
    fn gradient_vanishes_at_optimum() {
        let q = small();
        let g = q.full_grad(q.optimum().unwrap());
        assert!(g.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn identity_hessian_unit_offset() {
        let q = QuadraticSpec::new(
            Matrix::identity(3, 3),
            Vector::zeros(3),
            Matrix::zeros(2, 3),
        )
        .unwrap();
        let e1 = Vector::from_column_slice(&[1.0, 0.0, 0.0]);
        assert_eq!(q.full_grad(&e1), e1);
    }

    #[test]
    fn full_grad_is_average_of_sample_grads() {
        let q = small();
        let w = Vector::from_column_slice(&[0.3, 0.7, -1.1]);
        let mut avg = Vector::zeros(3);
        for n in 0..q.n_samples() {
            avg += q.sample_grad(&w, n);
        }
        avg /= q.n_samples() as f64;
        assert!((avg - q.full_grad(&w)).amax() < 1e-12);
        let (_, via_batch) = q.batch_loss_grad(&w, &all_indices(q.n_samples()));
        assert!((via_batch - q.full_grad(&w)).amax() < 1e-12);
    }

    #[test]
    fn gap_dominates_strong_convexity() {
        let q = small();
        let c = q.strong_convexity().unwrap();
        let w = Vector::from_column_slice(&[4.0, 0.0, -3.0]);
        let gap = q.full_loss(&w) - q.full_loss(q.optimum().unwrap());
        assert!(gap >= 0.5 * c * (w - q.optimum().unwrap()).norm_squared() - 1e-12);
    }

    #[test]
    fn rejects_indefinite() {
        let h = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(QuadraticSpec::new(h, Vector::zeros(2), Matrix::zeros(1, 2)).is_err());
    }
}
