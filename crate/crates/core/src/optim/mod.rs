//! Update rules over flat parameter vectors.
//!
//! Every optimizer consumes the current weights `w` and a stochastic gradient `g`
//! and produces the update direction `Ĝ` together with the next (optionally
//! projected) iterate `w' = Π(w − γ·Ĝ)`. Steps are deterministic: identical
//! inputs give bit-identical outputs.

mod baseline;
mod projection;
mod schedule;
mod trainable;

pub use baseline::{BaselineHyper, BaselineKind, BaselineState};
pub use projection::{project, FeasibleSet};
pub use schedule::{schedule_value, Schedule};
pub use trainable::{
    approx_loss_grads, ApproxLossGrads, DiagLinearState, FullLinearState, RankOneState,
    DEFAULT_FULL_DIM_CAP,
};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vector};

/// Step sizes for one iteration.
///
/// `gamma` moves the weights; `alpha` and `beta` train the optimizer's own
/// variables (`A`/`a`/`c` and `b` respectively). Baselines only read `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl Rates {
    pub fn new(gamma: f64, alpha: f64, beta: f64) -> Self {
        Rates { gamma, alpha, beta }
    }

    pub fn sgd(gamma: f64) -> Self {
        Rates {
            gamma,
            alpha: 0.0,
            beta: 0.0,
        }
    }

    pub(crate) fn check_trainable(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.beta >= 0.0 && self.gamma > 0.0) {
            return Err(Error::invalid(format!(
                "rates require alpha >= 0, beta >= 0, gamma > 0 (got {self:?})"
            )));
        }
        Ok(())
    }
}

/// Output of a single optimizer step.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    /// Next iterate, already projected onto the feasible set.
    pub w: Vector,
    /// Update direction `Ĝ_t`.
    pub ghat: Vector,
}

/// Any of the supported optimizers behind one stepping interface.
#[derive(Debug, Clone, PartialEq)]
pub enum OptimizerState {
    PseudoLinear(FullLinearState),
    Diagonal(DiagLinearState),
    RankOne(RankOneState),
    Baseline(BaselineState),
}

impl OptimizerState {
    pub fn step(
        &mut self,
        w: &Vector,
        g: &Vector,
        rates: Rates,
        set: &FeasibleSet,
    ) -> Result<Step> {
        match self {
            OptimizerState::PseudoLinear(s) => s.step(w, g, rates, set),
            OptimizerState::Diagonal(s) => s.step(w, g, rates, set),
            OptimizerState::RankOne(s) => s.step(w, g, rates, set),
            OptimizerState::Baseline(s) => s.step(w, g, rates.gamma, set),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OptimizerState::PseudoLinear(_) => "pseudo_linear",
            OptimizerState::Diagonal(_) => "diagonal",
            OptimizerState::RankOne(_) => "rank_one",
            OptimizerState::Baseline(s) => s.kind().name(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            OptimizerState::PseudoLinear(s) => s.b.len(),
            OptimizerState::Diagonal(s) => s.b.len(),
            OptimizerState::RankOne(s) => s.b.len(),
            OptimizerState::Baseline(s) => s.m.len(),
        }
    }
}

fn descend(w: &Vector, ghat: &Vector, gamma: f64, set: &FeasibleSet) -> Result<Vector> {
    let mut next = w - ghat * gamma;
    set.project_in_place(&mut next);
    if next.iter().all(|x| x.is_finite()) && ghat.iter().all(|x| x.is_finite()) {
        Ok(next)
    } else {
        Err(Error::NonFinite)
    }
}
