//! Pseudo-linear gradient estimators `Ĝ = A·w + b` whose coefficients are trained
//! online by gradient descent on the approximation loss `½‖g − A·w − b‖²`.
//!
//! Within one step the optimizer variables are updated from their previous
//! values (both `A` and `b` see the same residual `r = g − A_prev·w − b_prev`),
//! then `Ĝ` is formed from the new values, then the weights move.

use super::{descend, FeasibleSet, Rates, Step};
use crate::error::check_dim;
use crate::{Error, Matrix, Result, Vector};

/// Largest `d` accepted by [`FullLinearState`] unless overridden; `A` costs `d²` floats.
pub const DEFAULT_FULL_DIM_CAP: usize = 4096;

/// Value and gradients of `l(A, b) = ½‖g − A·w − b‖₂²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxLossGrads {
    pub loss: f64,
    pub grad_a: Matrix,
    pub grad_b: Vector,
}

pub fn approx_loss_grads(
    a: &Matrix,
    b: &Vector,
    w: &Vector,
    g: &Vector,
) -> Result<ApproxLossGrads> {
    let d = w.len();
    check_dim(d, g.len())?;
    check_dim(d, b.len())?;
    check_dim(d, a.nrows())?;
    check_dim(d, a.ncols())?;
    let r = g - a * w - b;
    let grad_a = Matrix::from_fn(d, d, |i, j| -(r[i] * w[j]));
    Ok(ApproxLossGrads {
        loss: 0.5 * r.norm_squared(),
        grad_a,
        grad_b: -r,
    })
}

/// Full pseudo-linear optimizer state: dense `A` and offset `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct FullLinearState {
    pub a: Matrix,
    pub b: Vector,
}

impl FullLinearState {
    /// Zero-initialized state, capped at [`DEFAULT_FULL_DIM_CAP`].
    pub fn new(d: usize) -> Result<Self> {
        Self::with_cap(d, DEFAULT_FULL_DIM_CAP)
    }

    pub fn with_cap(d: usize, cap: usize) -> Result<Self> {
        if d > cap {
            return Err(Error::DimensionTooLarge { d, cap });
        }
        Ok(FullLinearState {
            a: Matrix::zeros(d, d),
            b: Vector::zeros(d),
        })
    }

    pub fn from_parts(a: Matrix, b: Vector) -> Result<Self> {
        check_dim(b.len(), a.nrows())?;
        check_dim(b.len(), a.ncols())?;
        Ok(FullLinearState { a, b })
    }

    /// Current estimate `A·w + b` without updating anything.
    pub fn estimate(&self, w: &Vector) -> Vector {
        &self.a * w + &self.b
    }

    /// On `Err(NonFinite)` the state has already been partially updated and
    /// should be discarded.
    pub fn step(
        &mut self,
        w: &Vector,
        g: &Vector,
        rates: Rates,
        set: &FeasibleSet,
    ) -> Result<Step> {
        let d = self.b.len();
        check_dim(d, w.len())?;
        check_dim(d, g.len())?;
        rates.check_trainable()?;

        let r = g - &self.a * w - &self.b;
        let alpha = rates.alpha;
        // A += α · r wᵀ, entry by entry so it equals A − α·∇_A l bit for bit.
        for j in 0..d {
            let wj = w[j];
            let mut col = self.a.column_mut(j);
            for i in 0..d {
                col[i] += alpha * (r[i] * wj);
            }
        }
        self.b.axpy(rates.beta, &r, 1.0);
        let ghat = &self.a * w + &self.b;
        let next = descend(w, &ghat, rates.gamma, set)?;
        Ok(Step { w: next, ghat })
    }
}

/// Diagonal variant: `A = diag(a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagLinearState {
    pub a: Vector,
    pub b: Vector,
}

impl DiagLinearState {
    pub fn new(d: usize) -> Self {
        DiagLinearState {
            a: Vector::zeros(d),
            b: Vector::zeros(d),
        }
    }

    pub fn estimate(&self, w: &Vector) -> Vector {
        self.a.component_mul(w) + &self.b
    }

    pub fn step(
        &mut self,
        w: &Vector,
        g: &Vector,
        rates: Rates,
        set: &FeasibleSet,
    ) -> Result<Step> {
        let d = self.b.len();
        check_dim(d, w.len())?;
        check_dim(d, g.len())?;
        rates.check_trainable()?;

        let r = g - self.a.component_mul(w) - &self.b;
        let a = &self.a + r.component_mul(w) * rates.alpha;
        let b = &self.b + &r * rates.beta;
        let ghat = a.component_mul(w) + &b;
        let next = descend(w, &ghat, rates.gamma, set)?;
        self.a = a;
        self.b = b;
        Ok(Step { w: next, ghat })
    }
}

/// Rank-one variant: `A = a·cᵀ`.
///
/// `a = c = 0` is absorbing (neither factor can leave zero), so [`RankOneState::new`]
/// starts `c` at the unit vector `1/√d`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneState {
    pub a: Vector,
    pub c: Vector,
    pub b: Vector,
}

impl RankOneState {
    pub fn new(d: usize) -> Self {
        let scale = if d == 0 { 0.0 } else { 1.0 / (d as f64).sqrt() };
        RankOneState {
            a: Vector::zeros(d),
            c: Vector::from_element(d, scale),
            b: Vector::zeros(d),
        }
    }

    pub fn estimate(&self, w: &Vector) -> Vector {
        &self.a * self.c.dot(w) + &self.b
    }

    pub fn step(
        &mut self,
        w: &Vector,
        g: &Vector,
        rates: Rates,
        set: &FeasibleSet,
    ) -> Result<Step> {
        let d = self.b.len();
        check_dim(d, w.len())?;
        check_dim(d, g.len())?;
        rates.check_trainable()?;

        let cw = self.c.dot(w);
        let r = g - &self.a * cw - &self.b;
        // The c-update reads (rᵀa)·w: the residual's inner product with the old a.
        let ra = r.dot(&self.a);
        let a = &self.a + &r * (rates.alpha * cw);
        let c = &self.c + w * (rates.alpha * ra);
        let b = &self.b + &r * rates.beta;
        let ghat = &a * c.dot(w) + &b;
        let next = descend(w, &ghat, rates.gamma, set)?;
        self.a = a;
        self.c = c;
        self.b = b;
        Ok(Step { w: next, ghat })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::{BaselineHyper, BaselineKind, BaselineState};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn v(x: &[f64]) -> Vector {
        Vector::from_column_slice(x)
    }

    #[test]
    fn approx_loss_hand_values() {
        let out =
            approx_loss_grads(&Matrix::zeros(1, 1), &v(&[0.0]), &v(&[2.0]), &v(&[3.0])).unwrap();
        assert_eq!(out.loss, 4.5);
        assert_eq!(out.grad_a[(0, 0)], -6.0);
        assert_eq!(out.grad_b[0], -3.0);
    }

    #[test]
    fn approx_loss_exact_fits() {
        let g = v(&[1.0, -2.0, 0.5]);
        let w = v(&[0.3, 0.1, -4.0]);
        let fit_b = approx_loss_grads(&Matrix::zeros(3, 3), &g, &w, &g).unwrap();
        assert_eq!(fit_b.loss, 0.0);
        assert!(fit_b.grad_a.iter().all(|x| *x == 0.0));
        assert!(fit_b.grad_b.iter().all(|x| *x == 0.0));

        let fit_a = approx_loss_grads(&Matrix::identity(3, 3), &Vector::zeros(3), &g, &g).unwrap();
        assert_eq!(fit_a.loss, 0.0);
    }

    #[test]
    fn approx_loss_dimension_mismatch() {
        let err = approx_loss_grads(
            &Matrix::zeros(2, 2),
            &v(&[0.0, 0.0]),
            &v(&[1.0]),
            &v(&[1.0, 2.0]),
        );
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn pseudo_linear_hand_values() {
        let mut s = FullLinearState::new(1).unwrap();
        let step = s
            .step(
                &v(&[2.0]),
                &v(&[3.0]),
                Rates::new(0.1, 0.1, 0.5),
                &FeasibleSet::Unconstrained,
            )
            .unwrap();
        assert_relative_eq!(s.a[(0, 0)], 0.6, epsilon = 1e-15);
        assert_relative_eq!(s.b[0], 1.5, epsilon = 1e-15);
        assert_relative_eq!(step.ghat[0], 2.7, epsilon = 1e-15);
        assert_relative_eq!(step.w[0], 1.73, epsilon = 1e-15);
    }

    #[test]
    fn pseudo_linear_first_step_scales_gradient() {
        let w = v(&[0.5, -1.0, 2.0]);
        let g = v(&[1.0, 0.25, -3.0]);
        let (alpha, beta) = (0.07, 0.3);
        let mut s = FullLinearState::new(3).unwrap();
        let step = s
            .step(
                &w,
                &g,
                Rates::new(0.1, alpha, beta),
                &FeasibleSet::Unconstrained,
            )
            .unwrap();
        let expect = &g * (alpha * w.norm_squared() + beta);
        assert_relative_eq!(step.ghat, expect, max_relative = 1e-14);
    }

    #[test]
    fn pseudo_linear_momentum_recursion() {
        let mut s = FullLinearState::from_parts(Matrix::zeros(2, 2), v(&[0.4, -1.0])).unwrap();
        let g = v(&[2.0, 1.0]);
        let step = s
            .step(
                &v(&[1.0, 1.0]),
                &g,
                Rates::new(0.1, 0.0, 0.2),
                &FeasibleSet::Unconstrained,
            )
            .unwrap();
        let expect = v(&[0.8 * 0.4 + 0.2 * 2.0, -0.8 + 0.2 * 1.0]);
        assert_relative_eq!(s.b, expect, max_relative = 1e-14);
        assert_eq!(step.ghat, s.b);
    }

    #[test]
    fn full_dimension_cap() {
        assert!(matches!(
            FullLinearState::with_cap(11, 10),
            Err(Error::DimensionTooLarge { d: 11, cap: 10 })
        ));
        assert!(FullLinearState::with_cap(10, 10).is_ok());
    }

    #[test]
    fn non_finite_is_an_error() {
        let mut s = DiagLinearState::new(1);
        let out = s.step(
            &v(&[1.0]),
            &v(&[f64::NAN]),
            Rates::new(0.1, 0.1, 0.1),
            &FeasibleSet::Unconstrained,
        );
        assert!(matches!(out, Err(Error::NonFinite)));
        let mut f = FullLinearState::new(1).unwrap();
        let out = f.step(
            &v(&[1e200]),
            &v(&[1e200]),
            Rates::new(1.0, 1e200, 1.0),
            &FeasibleSet::Unconstrained,
        );
        assert!(matches!(out, Err(Error::NonFinite)));
    }

    #[test]
    fn diagonal_hand_values() {
        let mut s = DiagLinearState::new(2);
        let step = s
            .step(
                &v(&[1.0, 2.0]),
                &v(&[1.0, -1.0]),
                Rates::new(0.1, 0.1, 0.5),
                &FeasibleSet::Unconstrained,
            )
            .unwrap();
        assert_relative_eq!(s.a, v(&[0.1, -0.2]), epsilon = 1e-15);
        assert_relative_eq!(s.b, v(&[0.5, -0.5]), epsilon = 1e-15);
        assert_relative_eq!(step.ghat, v(&[0.6, -0.9]), epsilon = 1e-15);
    }

    #[test]
    fn diagonal_alpha_zero_beta_one_is_sgd() {
        let mut s = DiagLinearState::new(3);
        let g = v(&[0.3, -7.0, 2.5]);
        let step = s
            .step(
                &v(&[1.0, 2.0, 3.0]),
                &g,
                Rates::new(0.1, 0.0, 1.0),
                &FeasibleSet::Unconstrained,
            )
            .unwrap();
        assert_eq!(step.ghat, g);
    }

    #[test]
    fn one_dimensional_variants_agree_at_first_step() {
        let (w, g) = (v(&[1.7]), v(&[-0.6]));
        let rates = Rates::new(0.05, 0.2, 0.4);
        let set = FeasibleSet::Unconstrained;
        let full = FullLinearState::new(1)
            .unwrap()
            .step(&w, &g, rates, &set)
            .unwrap();
        let diag = DiagLinearState::new(1).step(&w, &g, rates, &set).unwrap();
        let expect = (0.2 * 1.7 * 1.7 + 0.4) * -0.6;
        assert_relative_eq!(full.ghat[0], expect, max_relative = 1e-14);
        assert_relative_eq!(diag.ghat[0], expect, max_relative = 1e-14);
        assert_relative_eq!(full.w[0], diag.w[0], max_relative = 1e-14);
        // Rank-one from a = 0: a' = α·r·(c·w), c unchanged since rᵀa = 0.
        let mut r1 = RankOneState::new(1);
        let rank = r1.step(&w, &g, rates, &set).unwrap();
        assert_eq!(r1.c[0], 1.0);
        assert_relative_eq!(rank.ghat[0], expect, max_relative = 1e-14);
    }

    #[test]
    fn rank_one_zero_init_is_absorbing() {
        let mut s = RankOneState {
            a: Vector::zeros(2),
            c: Vector::zeros(2),
            b: Vector::zeros(2),
        };
        let g = v(&[1.0, -2.0]);
        let step = s
            .step(
                &v(&[0.5, 0.5]),
                &g,
                Rates::new(0.1, 0.3, 0.25),
                &FeasibleSet::Unconstrained,
            )
            .unwrap();
        assert!(s.a.iter().chain(s.c.iter()).all(|x| *x == 0.0));
        assert_eq!(s.b, &g * 0.25);
        assert_eq!(step.ghat, &g * 0.25);
    }

    #[test]
    fn rank_one_hand_values() {
        let mut s = RankOneState {
            a: Vector::zeros(2),
            c: v(&[1.0, 1.0]),
            b: Vector::zeros(2),
        };
        let step = s
            .step(
                &v(&[1.0, 2.0]),
                &v(&[1.0, -1.0]),
                Rates::new(0.1, 0.1, 0.5),
                &FeasibleSet::Unconstrained,
            )
            .unwrap();
        assert_relative_eq!(s.a, v(&[0.3, -0.3]), epsilon = 1e-15);
        assert_eq!(s.c, v(&[1.0, 1.0]));
        assert_relative_eq!(s.b, v(&[0.5, -0.5]), epsilon = 1e-15);
        assert_relative_eq!(step.ghat, v(&[1.4, -1.4]), epsilon = 1e-14);
    }

    #[test]
    fn rank_one_alpha_zero_freezes_factors() {
        let mut s = RankOneState {
            a: v(&[0.2, -0.1]),
            c: v(&[0.5, 1.5]),
            b: v(&[0.3, 0.3]),
        };
        let before = s.clone();
        let (w, g) = (v(&[1.0, -1.0]), v(&[2.0, 0.0]));
        s.step(
            &w,
            &g,
            Rates::new(0.1, 0.0, 0.5),
            &FeasibleSet::Unconstrained,
        )
        .unwrap();
        assert_eq!(s.a, before.a);
        assert_eq!(s.c, before.c);
        let r = &g - &before.a * before.c.dot(&w) - &before.b;
        assert_relative_eq!(s.b, &before.b + r * 0.5, max_relative = 1e-15);
    }

    #[test]
    fn rank_one_default_c_is_unit() {
        let s = RankOneState::new(16);
        assert_relative_eq!(s.c.norm(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn gradient_descent_consistency_is_exact() {
        let a = Matrix::from_fn(3, 3, |i, j| 0.1 * (i as f64) - 0.2 * (j as f64) + 0.05);
        let b = v(&[0.3, -0.2, 0.9]);
        let w = v(&[1.3, -0.7, 0.21]);
        let g = v(&[-0.4, 2.2, 0.6]);
        let (alpha, beta) = (0.013, 0.37);
        let grads = approx_loss_grads(&a, &b, &w, &g).unwrap();
        let mut s = FullLinearState::from_parts(a.clone(), b.clone()).unwrap();
        s.step(
            &w,
            &g,
            Rates::new(0.1, alpha, beta),
            &FeasibleSet::Unconstrained,
        )
        .unwrap();
        assert_eq!(s.a, &a - grads.grad_a * alpha);
        assert_eq!(s.b, &b - grads.grad_b * beta);
    }

    #[test]
    fn momentum_equivalence_short_run() {
        let mut to = FullLinearState::new(2).unwrap();
        let mut mom = BaselineState::new(
            BaselineKind::Momentum,
            2,
            BaselineHyper {
                beta1: 0.9,
                ..Default::default()
            },
        );
        let set = FeasibleSet::Unconstrained;
        let (mut w1, mut w2) = (v(&[1.0, -1.0]), v(&[1.0, -1.0]));
        for k in 0..50 {
            let g = v(&[(k as f64).sin(), (0.3 * k as f64).cos()]);
            w1 = to
                .step(&w1, &g, Rates::new(0.05, 0.0, 0.1), &set)
                .unwrap()
                .w;
            w2 = mom.step(&w2, &g, 0.05, &set).unwrap().w;
        }
        assert!((w1 - w2).amax() <= 1e-12);
    }

    #[test]
    fn step_is_deterministic() {
        let w = v(&[0.1, 0.2, -0.3]);
        let g = v(&[1.0, 0.0, -1.0]);
        let rates = Rates::new(0.1, 0.2, 0.3);
        let set = FeasibleSet::ball(0.2).unwrap();
        let mut s1 = RankOneState::new(3);
        let mut s2 = RankOneState::new(3);
        assert_eq!(
            s1.step(&w, &g, rates, &set).unwrap(),
            s2.step(&w, &g, rates, &set).unwrap()
        );
        assert_eq!(s1, s2);
    }

    fn vec_strategy(d: usize) -> impl Strategy<Value = Vector> {
        proptest::collection::vec(-3.0f64..3.0, d).prop_map(Vector::from_vec)
    }

    proptest! {
        #[test]
        fn full_delta_recursion(
            a in proptest::collection::vec(-1.0f64..1.0, 16),
            b in vec_strategy(4), w in vec_strategy(4), g in vec_strategy(4),
            alpha in 0.0f64..0.5, beta in 0.0f64..1.0,
        ) {
            let a = Matrix::from_vec(4, 4, a);
            let prev = &a * &w + &b;
            let r = &g - &prev;
            let mut s = FullLinearState::from_parts(a, b).unwrap();
            let step = s.step(&w, &g, Rates::new(0.1, alpha, beta), &FeasibleSet::Unconstrained).unwrap();
            let delta = alpha * w.norm_squared() + beta;
            let lhs = &step.ghat - &prev;
            let rhs = &r * delta;
            let scale = lhs.norm().max(rhs.norm()).max(prev.norm()).max(1e-300);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
        }

        #[test]
        fn diagonal_delta_recursion(
            a in vec_strategy(5), b in vec_strategy(5), w in vec_strategy(5), g in vec_strategy(5),
            alpha in 0.0f64..0.5, beta in 0.0f64..1.0,
        ) {
            let prev = a.component_mul(&w) + &b;
            let r = &g - &prev;
            let mut s = DiagLinearState { a, b };
            let step = s.step(&w, &g, Rates::new(0.1, alpha, beta), &FeasibleSet::Unconstrained).unwrap();
            for i in 0..5 {
                let lhs = step.ghat[i] - prev[i];
                let rhs = (alpha * w[i] * w[i] + beta) * r[i];
                let scale = lhs.abs().max(rhs.abs()).max(prev[i].abs()).max(1e-300);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn projected_step_is_bounded_by_gamma_ghat(
            w in vec_strategy(3), g in vec_strategy(3), gamma in 0.01f64..2.0, radius in 0.5f64..4.0,
        ) {
            let set = FeasibleSet::ball(radius).unwrap();
            let w = crate::optim::project(&w, &set);
            let mut s = DiagLinearState::new(3);
            let step = s.step(&w, &g, Rates::new(gamma, 0.1, 0.5), &set).unwrap();
            prop_assert!((&step.w - &w).norm() <= gamma * step.ghat.norm() * (1.0 + 1e-12) + 1e-15);
        }
    }
}
