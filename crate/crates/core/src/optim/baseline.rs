//! Classical update directions written as recursions over moment buffers.
//!
//! `ε` sits inside the square root and ADAM is not bias corrected:
//!
//! | kind     | update                                                      |
//! |----------|-------------------------------------------------------------|
//! | SGD      | `Ĝ = g`                                                     |
//! | Momentum | `m ← β₁m + (1−β₁)g`, `Ĝ = m`                                |
//! | Adagrad  | `v ← v + g⊙g`, `Ĝ = g / √(v/t + ε)`                         |
//! | RMSProp  | `v ← β₂v + (1−β₂)g⊙g`, `Ĝ = g / √(v + ε)`                   |
//! | ADAM     | `m ← β₁m + (1−β₁)g`, `v ← β₂v + (1−β₂)g⊙g`, `Ĝ = m / √(v + ε)` |

use serde::{Deserialize, Serialize};

use super::{descend, FeasibleSet, Step};
use crate::error::check_dim;
use crate::{Error, Result, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    Sgd,
    Momentum,
    Adagrad,
    #[serde(rename = "rmsprop")]
    RmsProp,
    Adam,
}

impl BaselineKind {
    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::Sgd => "sgd",
            BaselineKind::Momentum => "momentum",
            BaselineKind::Adagrad => "adagrad",
            BaselineKind::RmsProp => "rmsprop",
            BaselineKind::Adam => "adam",
        }
    }
}

/// Fixed coefficients. RMSProp reads its decay from `beta2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineHyper {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for BaselineHyper {
    fn default() -> Self {
        BaselineHyper {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl BaselineHyper {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..1.0).contains(&x);
        if !unit(self.beta1) || !unit(self.beta2) {
            return Err(Error::invalid(format!(
                "beta1 and beta2 must lie in [0, 1), got {} and {}",
                self.beta1, self.beta2
            )));
        }
        if !(self.eps > 0.0) {
            return Err(Error::invalid(format!("eps must be > 0, got {}", self.eps)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineState {
    kind: BaselineKind,
    hyper: BaselineHyper,
    /// First moment / momentum buffer.
    pub m: Vector,
    /// Second moment / squared-gradient accumulator.
    pub v: Vector,
    /// Completed steps.
    pub t: u64,
}

impl BaselineState {
    pub fn new(kind: BaselineKind, d: usize, hyper: BaselineHyper) -> Self {
        BaselineState {
            kind,
            hyper,
            m: Vector::zeros(d),
            v: Vector::zeros(d),
            t: 0,
        }
    }

    pub fn kind(&self) -> BaselineKind {
        self.kind
    }

    pub fn hyper(&self) -> &BaselineHyper {
        &self.hyper
    }

    pub fn step(&mut self, w: &Vector, g: &Vector, gamma: f64, set: &FeasibleSet) -> Result<Step> {
        let d = self.m.len();
        check_dim(d, w.len())?;
        check_dim(d, g.len())?;
        if !(gamma > 0.0) {
            return Err(Error::invalid(format!("gamma must be > 0, got {gamma}")));
        }
        let BaselineHyper { beta1, beta2, eps } = self.hyper;
        let t = self.t + 1;
        let (m, v, ghat) = match self.kind {
            BaselineKind::Sgd => (self.m.clone(), self.v.clone(), g.clone()),
            BaselineKind::Momentum => {
                let m = &self.m * beta1 + g * (1.0 - beta1);
                (m.clone(), self.v.clone(), m)
            }
            BaselineKind::Adagrad => {
                let v = &self.v + g.component_mul(g);
                let tf = t as f64;
                let ghat = g.zip_map(&v, |gi, vi| gi / (vi / tf + eps).sqrt());
                (self.m.clone(), v, ghat)
            }
            BaselineKind::RmsProp => {
                let v = &self.v * beta2 + g.component_mul(g) * (1.0 - beta2);
                let ghat = g.zip_map(&v, |gi, vi| gi / (vi + eps).sqrt());
                (self.m.clone(), v, ghat)
            }
            BaselineKind::Adam => {
                let m = &self.m * beta1 + g * (1.0 - beta1);
                let v = &self.v * beta2 + g.component_mul(g) * (1.0 - beta2);
                let ghat = m.zip_map(&v, |mi, vi| mi / (vi + eps).sqrt());
                (m, v, ghat)
            }
        };
        let next = descend(w, &ghat, gamma, set)?;
        self.m = m;
        self.v = v;
        self.t = t;
        Ok(Step { w: next, ghat })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn one(x: f64) -> Vector {
        Vector::from_element(1, x)
    }

    fn first_ghat(kind: BaselineKind, g: f64) -> f64 {
        let mut s = BaselineState::new(kind, 1, BaselineHyper::default());
        s.step(&one(0.0), &one(g), 0.1, &FeasibleSet::Unconstrained)
            .unwrap()
            .ghat[0]
    }

    #[test]
    fn sgd_is_identity() {
        assert_eq!(first_ghat(BaselineKind::Sgd, -2.5), -2.5);
    }

    #[test]
    fn momentum_first_step() {
        assert_relative_eq!(
            first_ghat(BaselineKind::Momentum, 1.0),
            0.1,
            epsilon = 1e-15
        );
    }

    #[test]
    fn adam_first_step_has_no_bias_correction() {
        let expect = 0.1 / (0.001f64 + 1e-8).sqrt();
        assert_relative_eq!(
            first_ghat(BaselineKind::Adam, 1.0),
            expect,
            max_relative = 1e-14
        );
        assert!((expect - 3.16226).abs() < 1e-5);
    }

    #[test]
    fn adagrad_matches_closed_form() {
        let gs = [0.5, -1.0, 2.0, 0.25];
        let mut s = BaselineState::new(BaselineKind::Adagrad, 1, BaselineHyper::default());
        let mut w = one(0.0);
        for (k, &g) in gs.iter().enumerate() {
            let step = s
                .step(&w, &one(g), 0.1, &FeasibleSet::Unconstrained)
                .unwrap();
            w = step.w;
            let t = (k + 1) as f64;
            let sum_sq: f64 = gs[..=k].iter().map(|x| x * x).sum();
            assert_relative_eq!(
                step.ghat[0],
                g / (sum_sq / t + 1e-8).sqrt(),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn rmsprop_and_adam_match_closed_form_sums() {
        let gs = [0.5, -1.0, 2.0, 0.25, 3.0];
        let hyper = BaselineHyper {
            beta1: 0.8,
            beta2: 0.9,
            eps: 1e-6,
        };
        let mut rms = BaselineState::new(BaselineKind::RmsProp, 1, hyper);
        let mut adam = BaselineState::new(BaselineKind::Adam, 1, hyper);
        let set = FeasibleSet::Unconstrained;
        for t in 1..=gs.len() {
            let g = one(gs[t - 1]);
            let r = rms.step(&one(0.0), &g, 0.1, &set).unwrap().ghat[0];
            let a = adam.step(&one(0.0), &g, 0.1, &set).unwrap().ghat[0];
            let ema = |beta: f64, f: &dyn Fn(f64) -> f64| {
                (1.0 - beta)
                    * (1..=t)
                        .map(|k| beta.powi((t - k) as i32) * f(gs[k - 1]))
                        .sum::<f64>()
            };
            let second = ema(0.9, &|x| x * x);
            let first = ema(0.8, &|x| x);
            assert_relative_eq!(r, gs[t - 1] / (second + 1e-6).sqrt(), max_relative = 1e-12);
            assert_relative_eq!(a, first / (second + 1e-6).sqrt(), max_relative = 1e-12);
        }
    }

    #[test]
    fn second_moment_stays_non_negative() {
        let mut s = BaselineState::new(BaselineKind::RmsProp, 3, BaselineHyper::default());
        let mut w = Vector::zeros(3);
        for k in 0..20 {
            let g = Vector::from_fn(3, |i, _| ((k * 3 + i) as f64).sin() * 5.0);
            w = s.step(&w, &g, 0.01, &FeasibleSet::Unconstrained).unwrap().w;
            assert!(s.v.iter().all(|x| *x >= 0.0));
        }
        assert_eq!(s.t, 20);
    }

    #[test]
    fn invalid_hyper() {
        assert!(BaselineHyper {
            beta1: 1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(BaselineHyper {
            eps: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(BaselineHyper::default().validate().is_ok());
    }
}
