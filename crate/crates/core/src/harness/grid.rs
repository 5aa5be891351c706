use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Method};
use crate::optim::{BaselineHyper, Schedule};
use crate::theory::Theorem1Config;
use crate::{Error, Result};

/// One fully resolved optimizer configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub method: Method,
    pub gamma: Schedule,
    pub alpha: Schedule,
    pub beta: Schedule,
    pub hyper: BaselineHyper,
}

impl GridPoint {
    pub fn new(
        method: Method,
        gamma: Schedule,
        alpha: Schedule,
        beta: Schedule,
        hyper: BaselineHyper,
    ) -> Self {
        GridPoint {
            method,
            gamma,
            alpha,
            beta,
            hyper,
        }
    }

    /// Wires the inverse-time schedules of a theorem configuration. Baselines
    /// only take its `γ_t`.
    pub fn theorem1(method: Method, cfg: &Theorem1Config, hyper: BaselineHyper) -> Self {
        let (alpha, beta) = if method.is_trainable() {
            (cfg.alpha_schedule(), cfg.beta_schedule())
        } else {
            (Schedule::constant(0.0), Schedule::constant(0.0))
        };
        GridPoint::new(method, cfg.gamma_schedule(), alpha, beta, hyper)
    }

    /// Stable identifier, unique within a method.
    pub fn label(&self) -> String {
        if self.method.is_trainable() {
            format!(
                "gamma={};alpha={};beta={}",
                self.gamma.label(),
                self.alpha.label(),
                self.beta.label()
            )
        } else {
            format!("gamma={}", self.gamma.label())
        }
    }

    /// Flat view of the resolved values, stored in run records.
    pub fn hyperparameters(&self) -> BTreeMap<String, f64> {
        let mut map = BTreeMap::new();
        let mut put = |prefix: &str, s: &Schedule| {
            map.insert(prefix.to_string(), s.base());
            match *s {
                Schedule::ExpDecay { rate, .. } => {
                    map.insert(format!("{prefix}_decay"), rate);
                }
                Schedule::InverseT { mu, .. } | Schedule::InverseTSquared { mu, .. } => {
                    map.insert("mu".to_string(), mu);
                }
                Schedule::Constant { .. } => {}
            }
        };
        put("gamma", &self.gamma);
        if self.method.is_trainable() {
            put("alpha", &self.alpha);
            put("beta", &self.beta);
        } else {
            map.insert("beta1".into(), self.hyper.beta1);
            map.insert("beta2".into(), self.hyper.beta2);
            map.insert("eps".into(), self.hyper.eps);
        }
        map
    }
}

/// Cartesian product of every optimizer's `γ × α × β` axes crossed with the
/// schedule variants (constant first, then each decay rate). Ordering follows
/// the declared optimizer order, then the axes in that order with the schedule
/// varying fastest.
///
/// Decay applies to `γ`; `α` and `β` stay constant.
pub fn expand_grid(cfg: &ExperimentConfig) -> Result<Vec<GridPoint>> {
    let mut decays: Vec<Option<f64>> = Vec::new();
    if cfg.schedules.constant {
        decays.push(None);
    }
    decays.extend(cfg.schedules.decay_rates.iter().copied().map(Some));
    if decays.is_empty() {
        return Err(Error::Config("no schedule variants selected".into()));
    }
    let mut points = Vec::new();
    for opt in &cfg.optimizers {
        let axes = [opt.gamma_axis(), opt.alpha_axis(), opt.beta_axis()];
        if let Some(i) = axes.iter().position(Vec::is_empty) {
            let name = ["gamma", "alpha", "beta"][i];
            return Err(Error::Config(format!(
                "{}: {name} axis is empty",
                opt.method.name()
            )));
        }
        for &gamma in &axes[0] {
            for &alpha in &axes[1] {
                for &beta in &axes[2] {
                    for decay in &decays {
                        let g = match *decay {
                            None => Schedule::constant(gamma),
                            Some(rate) => Schedule::ExpDecay { base: gamma, rate },
                        };
                        points.push(GridPoint::new(
                            opt.method,
                            g,
                            Schedule::constant(alpha),
                            Schedule::constant(beta),
                            opt.hyper,
                        ));
                    }
                }
            }
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{OptimizerConfig, ProblemConfig, ScheduleConfig};

    fn cfg(opts: Vec<OptimizerConfig>, decay_rates: Vec<f64>) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(
            ProblemConfig::Quadratic {
                dim: 2,
                kappa: 2.0,
                n_samples: 8,
                seed: 0,
            },
            opts,
        );
        c.schedules = ScheduleConfig {
            constant: true,
            decay_rates,
        };
        c
    }

    fn opt(method: Method, gamma: &[f64], alpha: &[f64], beta: &[f64]) -> OptimizerConfig {
        OptimizerConfig {
            gamma: Some(gamma.to_vec()),
            alpha: method.is_trainable().then(|| alpha.to_vec()),
            beta: method.is_trainable().then(|| beta.to_vec()),
            ..OptimizerConfig::new(method)
        }
    }

    #[test]
    fn product_sizes() {
        let one = cfg(
            vec![opt(Method::Adam, &[1e-3, 1e-2, 0.1], &[], &[])],
            vec![],
        );
        assert_eq!(expand_grid(&one).unwrap().len(), 3);
        let to = cfg(
            vec![opt(Method::Diagonal, &[0.1, 0.2], &[0.0, 0.1], &[0.5, 1.0])],
            vec![],
        );
        assert_eq!(expand_grid(&to).unwrap().len(), 8);
        let decayed = cfg(
            vec![opt(Method::Diagonal, &[0.1, 0.2], &[0.0, 0.1], &[0.5, 1.0])],
            vec![0.6, 0.8, 0.95],
        );
        assert_eq!(expand_grid(&decayed).unwrap().len(), 32);
    }

    #[test]
    fn lexicographic_order() {
        let c = cfg(
            vec![opt(Method::RankOne, &[0.1, 0.2], &[0.0, 0.5], &[1.0])],
            vec![0.8],
        );
        let labels: Vec<(f64, f64, Option<f64>)> = expand_grid(&c)
            .unwrap()
            .iter()
            .map(|p| {
                let decay = match p.gamma {
                    Schedule::ExpDecay { rate, .. } => Some(rate),
                    _ => None,
                };
                (p.gamma.base(), p.alpha.base(), decay)
            })
            .collect();
        assert_eq!(
            labels,
            vec![
                (0.1, 0.0, None),
                (0.1, 0.0, Some(0.8)),
                (0.1, 0.5, None),
                (0.1, 0.5, Some(0.8)),
                (0.2, 0.0, None),
                (0.2, 0.0, Some(0.8)),
                (0.2, 0.5, None),
                (0.2, 0.5, Some(0.8)),
            ]
        );
    }

    #[test]
    fn empty_axis_is_an_error() {
        let c = cfg(vec![opt(Method::Diagonal, &[0.1], &[], &[0.5])], vec![]);
        assert!(expand_grid(&c).is_err());
        let mut c = cfg(vec![opt(Method::Adam, &[0.1], &[], &[])], vec![]);
        c.schedules.constant = false;
        assert!(expand_grid(&c).is_err());
    }

    #[test]
    fn labels_are_unique() {
        let c = cfg(
            vec![OptimizerConfig::new(Method::PseudoLinear)],
            vec![0.6, 0.8, 0.95],
        );
        let points = expand_grid(&c).unwrap();
        assert_eq!(points.len(), 9 * 5 * 5 * 4);
        let mut labels: Vec<String> = points.iter().map(GridPoint::label).collect();
        labels.sort();
        labels.dedup();
        assert_eq!(labels.len(), points.len());
    }
}
