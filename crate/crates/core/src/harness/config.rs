//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "problem": { "kind": "quadratic", "dim": 10, "kappa": 10.0, "n_samples": 256, "seed": 0 },
//!   "optimizers": [
//!     { "method": "adam", "gamma": [0.001, 0.002] },
//!     { "method": "diagonal", "gamma": [0.01], "alpha": [0.1], "beta": [0.5] }
//!   ],
//!   "schedules": { "constant": true, "decay_rates": [0.6, 0.8, 0.95] },
//!   "epochs": 30,
//!   "batch_size": 64,
//!   "seeds": [0, 1, 2, 3, 4],
//!   "mode": "experimental",
//!   "projection": { "kind": "unconstrained" },
//!   "tracking": { "gap": false, "variance": false },
//!   "out_dir": "results"
//! }
//! ```
//!
//! Everything except `problem` and `optimizers` may be omitted. Omitted grid axes
//! fall back to [`default_gamma_grid`] and [`DEFAULT_RATE_GRID`].

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{self, Dataset};
use crate::metrics::Tracking;
use crate::optim::{
    BaselineHyper, BaselineKind, BaselineState, DiagLinearState, FeasibleSet, FullLinearState,
    OptimizerState, RankOneState, DEFAULT_FULL_DIM_CAP,
};
use crate::problems::{BatchSampler, FfnSpec, LogisticSpec, Problem};
use crate::theory::{Theorem1Config, Theorem1Tuning};
use crate::{Error, Result};

pub const ADAM_GAMMA_GRID: [f64; 9] = [1e-5, 2e-5, 5e-5, 1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3];
pub const TO_GAMMA_GRID: [f64; 9] = [1e-3, 2e-3, 5e-3, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5];
/// Default grid for the trainable optimizers' `α` and `β`.
pub const DEFAULT_RATE_GRID: [f64; 5] = [0.0, 0.01, 0.1, 0.5, 1.0];
pub const DEFAULT_DECAY_RATES: [f64; 3] = [0.6, 0.8, 0.95];
pub const DEFAULT_SEEDS: [u64; 5] = [0, 1, 2, 3, 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Sgd,
    Momentum,
    Adagrad,
    #[serde(rename = "rmsprop")]
    RmsProp,
    Adam,
    PseudoLinear,
    Diagonal,
    RankOne,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Sgd => "sgd",
            Method::Momentum => "momentum",
            Method::Adagrad => "adagrad",
            Method::RmsProp => "rmsprop",
            Method::Adam => "adam",
            Method::PseudoLinear => "pseudo_linear",
            Method::Diagonal => "diagonal",
            Method::RankOne => "rank_one",
        }
    }

    pub fn is_trainable(self) -> bool {
        matches!(
            self,
            Method::PseudoLinear | Method::Diagonal | Method::RankOne
        )
    }

    pub fn baseline_kind(self) -> Option<BaselineKind> {
        Some(match self {
            Method::Sgd => BaselineKind::Sgd,
            Method::Momentum => BaselineKind::Momentum,
            Method::Adagrad => BaselineKind::Adagrad,
            Method::RmsProp => BaselineKind::RmsProp,
            Method::Adam => BaselineKind::Adam,
            _ => return None,
        })
    }

    /// Fresh optimizer state (zero `A`, `b`, moments) for dimension `d`.
    pub fn new_state(
        self,
        d: usize,
        hyper: BaselineHyper,
        full_dim_cap: usize,
    ) -> Result<OptimizerState> {
        Ok(match self {
            Method::PseudoLinear => {
                OptimizerState::PseudoLinear(FullLinearState::with_cap(d, full_dim_cap)?)
            }
            Method::Diagonal => OptimizerState::Diagonal(DiagLinearState::new(d)),
            Method::RankOne => OptimizerState::RankOne(RankOneState::new(d)),
            baseline => OptimizerState::Baseline(BaselineState::new(
                baseline.baseline_kind().expect("non-trainable method"),
                d,
                hyper,
            )),
        })
    }
}

/// `γ` grid used when an optimizer omits its own: the ADAM grid for the
/// adaptive baselines, the trainable-optimizer grid otherwise.
pub fn default_gamma_grid(method: Method) -> Vec<f64> {
    match method {
        Method::Adam | Method::Adagrad | Method::RmsProp => ADAM_GAMMA_GRID.to_vec(),
        _ => TO_GAMMA_GRID.to_vec(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<f64>>,
    /// Trainable optimizers only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    /// Trainable optimizers only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    #[serde(default)]
    pub hyper: BaselineHyper,
}

impl OptimizerConfig {
    pub fn new(method: Method) -> Self {
        OptimizerConfig {
            method,
            gamma: None,
            alpha: None,
            beta: None,
            hyper: BaselineHyper::default(),
        }
    }

    pub fn gamma_axis(&self) -> Vec<f64> {
        self.gamma
            .clone()
            .unwrap_or_else(|| default_gamma_grid(self.method))
    }

    /// `α` axis; `[0]` for baselines.
    pub fn alpha_axis(&self) -> Vec<f64> {
        self.rate_axis(&self.alpha)
    }

    /// `β` axis; `[0]` for baselines.
    pub fn beta_axis(&self) -> Vec<f64> {
        self.rate_axis(&self.beta)
    }

    fn rate_axis(&self, axis: &Option<Vec<f64>>) -> Vec<f64> {
        if self.method.is_trainable() {
            axis.clone().unwrap_or_else(|| DEFAULT_RATE_GRID.to_vec())
        } else {
            vec![0.0]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    /// Include the constant schedule.
    pub constant: bool,
    /// Per-epoch decay factors applied to `γ`.
    pub decay_rates: Vec<f64>,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            constant: true,
            decay_rates: DEFAULT_DECAY_RATES.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    /// Generated quadratic with spectrum in `[1, κ]`.
    Quadratic {
        dim: usize,
        kappa: f64,
        n_samples: usize,
        #[serde(default)]
        seed: u64,
    },
    Classification {
        source: DataSource,
        model: ModelConfig,
        #[serde(default)]
        standardize: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    Synthetic {
        n_samples: usize,
        features: usize,
        classes: usize,
        #[serde(default = "default_separation")]
        separation: f64,
        #[serde(default)]
        seed: u64,
    },
    Libsvm {
        path: PathBuf,
    },
    Csv {
        path: PathBuf,
        label_column: usize,
    },
}

fn default_separation() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Logistic {
        #[serde(default)]
        lambda: f64,
    },
    Ffn {
        #[serde(default = "default_hidden")]
        hidden: usize,
    },
}

fn default_hidden() -> usize {
    FfnSpec::DEFAULT_HIDDEN
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Constant / exponentially decaying schedules over the hyperparameter grids.
    #[default]
    Experimental,
    /// Inverse-time schedules derived from (or checked against) the problem
    /// constants.
    Theorem1,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Theorem1Options {
    /// Radius `D_w` of the feasible ball; defaults to `2‖w*‖`.
    pub radius: Option<f64>,
    /// Explicit constants; derived from the problem when absent.
    pub config: Option<Theorem1Config>,
    pub tuning: Theorem1Tuning,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    pub optimizers: Vec<OptimizerConfig>,
    #[serde(default)]
    pub schedules: ScheduleConfig,
    #[serde(default = "default_epochs")]
    pub epochs: u64,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub projection: FeasibleSet,
    #[serde(default)]
    pub tracking: Tracking,
    #[serde(default)]
    pub theorem1: Theorem1Options,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default = "default_cap")]
    pub full_dim_cap: usize,
}

fn default_epochs() -> u64 {
    30
}
fn default_batch_size() -> usize {
    BatchSampler::DEFAULT_BATCH_SIZE
}
fn default_seeds() -> Vec<u64> {
    DEFAULT_SEEDS.to_vec()
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("results")
}
fn default_cap() -> usize {
    DEFAULT_FULL_DIM_CAP
}

impl ExperimentConfig {
    pub fn new(problem: ProblemConfig, optimizers: Vec<OptimizerConfig>) -> Self {
        ExperimentConfig {
            problem,
            optimizers,
            schedules: ScheduleConfig::default(),
            epochs: default_epochs(),
            batch_size: default_batch_size(),
            seeds: default_seeds(),
            mode: Mode::default(),
            projection: FeasibleSet::default(),
            tracking: Tracking::default(),
            theorem1: Theorem1Options::default(),
            out_dir: default_out_dir(),
            full_dim_cap: default_cap(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Structural checks that do not need the problem instance.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.optimizers.is_empty() {
            return fail("at least one optimizer is required".into());
        }
        if self.seeds.is_empty() {
            return fail("at least one seed is required".into());
        }
        let mut seen = self.seeds.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.seeds.len() {
            return fail("seeds must be distinct".into());
        }
        if self.epochs < 1 {
            return fail("epochs must be >= 1".into());
        }
        if self.batch_size < 1 {
            return fail("batch_size must be >= 1".into());
        }
        if self.mode == Mode::Experimental
            && !self.schedules.constant
            && self.schedules.decay_rates.is_empty()
        {
            return fail(
                "schedules: enable the constant schedule or give at least one decay rate".into(),
            );
        }
        for &r in &self.schedules.decay_rates {
            if !(r > 0.0 && r <= 1.0) {
                return fail(format!("decay rate {r} outside (0, 1]"));
            }
        }
        for opt in &self.optimizers {
            let name = opt.method.name();
            if !opt.method.is_trainable() && (opt.alpha.is_some() || opt.beta.is_some()) {
                return fail(format!(
                    "{name}: alpha/beta axes apply to trainable optimizers only"
                ));
            }
            for (axis, values, positive) in [
                ("gamma", opt.gamma_axis(), true),
                ("alpha", opt.alpha_axis(), false),
                ("beta", opt.beta_axis(), false),
            ] {
                if values.is_empty() {
                    return fail(format!("{name}: {axis} axis is empty"));
                }
                if let Some(v) = values
                    .iter()
                    .find(|v| !(v.is_finite() && (**v > 0.0 || (!positive && **v == 0.0))))
                {
                    return fail(format!("{name}: invalid {axis} value {v}"));
                }
            }
            opt.hyper
                .validate()
                .map_err(|e| Error::Config(format!("{name}: {e}")))?;
        }
        self.projection
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        if self.mode == Mode::Theorem1 && !matches!(self.problem, ProblemConfig::Quadratic { .. }) {
            return fail(
                "theorem1 mode needs a problem with known optimum and curvature (quadratic)".into(),
            );
        }
        if self.tracking.gap && !matches!(self.problem, ProblemConfig::Quadratic { .. }) {
            return fail("gap tracking needs a problem with a known optimum (quadratic)".into());
        }
        if let Some(r) = self.theorem1.radius {
            if !(r > 0.0 && r.is_finite()) {
                return fail(format!("theorem1.radius must be positive, got {r}"));
            }
        }
        Ok(())
    }

    /// Instantiates the objective.
    pub fn build_problem(&self) -> Result<Box<dyn Problem>> {
        let problem: Box<dyn Problem> = match &self.problem {
            ProblemConfig::Quadratic {
                dim,
                kappa,
                n_samples,
                seed,
            } => Box::new(data::gen_quadratic(*dim, *kappa, *n_samples, *seed)?),
            ProblemConfig::Classification {
                source,
                model,
                standardize,
            } => {
                let ds = load_source(source)?;
                let ds = if *standardize {
                    data::standardize(&ds)
                } else {
                    ds
                };
                match *model {
                    ModelConfig::Logistic { lambda } => {
                        Box::new(LogisticSpec::from_dataset(&ds, lambda)?)
                    }
                    ModelConfig::Ffn { hidden } => Box::new(FfnSpec::from_dataset(&ds, hidden)?),
                }
            }
        };
        if self.batch_size > problem.n_samples() {
            return Err(Error::Config(format!(
                "batch_size {} exceeds the {} available samples",
                self.batch_size,
                problem.n_samples()
            )));
        }
        Ok(problem)
    }
}

fn load_source(source: &DataSource) -> Result<Dataset> {
    match source {
        DataSource::Synthetic {
            n_samples,
            features,
            classes,
            separation,
            seed,
        } => data::gen_logistic(*n_samples, *features, *classes, *separation, *seed),
        DataSource::Libsvm { path } => data::load_libsvm(path),
        DataSource::Csv { path, label_column } => data::load_csv(path, *label_column),
    }
}
