use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Step-size schedule.
///
/// `offset` selects between `t + μ` (offset 0) and `t − 1 + μ` (offset 1) in the
/// inverse-time families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    Constant {
        base: f64,
    },
    /// `base · rate^epoch`, advanced once per epoch.
    ExpDecay {
        base: f64,
        rate: f64,
    },
    InverseT {
        base: f64,
        mu: f64,
        offset: u8,
    },
    InverseTSquared {
        base: f64,
        mu: f64,
        offset: u8,
    },
}

impl Schedule {
    pub fn constant(base: f64) -> Self {
        Schedule::Constant { base }
    }

    pub fn base(&self) -> f64 {
        match *self {
            Schedule::Constant { base }
            | Schedule::ExpDecay { base, .. }
            | Schedule::InverseT { base, .. }
            | Schedule::InverseTSquared { base, .. } => base,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let base = self.base();
        // A zero base is allowed for the optimizer-variable rates (alpha = 0 freezes A).
        if !(base >= 0.0 && base.is_finite()) {
            return Err(Error::invalid(format!(
                "schedule base must be finite and >= 0, got {base}"
            )));
        }
        match *self {
            Schedule::ExpDecay { rate, .. } if !(rate > 0.0 && rate <= 1.0) => Err(Error::invalid(
                format!("decay rate must lie in (0, 1], got {rate}"),
            )),
            Schedule::InverseT { mu, offset, .. }
            | Schedule::InverseTSquared { mu, offset, .. } => {
                if !(mu >= 0.0 && mu.is_finite()) {
                    Err(Error::invalid(format!(
                        "mu must be finite and >= 0, got {mu}"
                    )))
                } else if offset > 1 {
                    Err(Error::invalid(format!(
                        "offset must be 0 or 1, got {offset}"
                    )))
                } else if offset == 1 && mu <= 0.0 {
                    Err(Error::invalid(
                        "offset 1 with mu = 0 divides by zero at t = 1",
                    ))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Rate at (1-based) step `t` during (0-based) `epoch`.
    pub fn value(&self, t: u64, epoch: u64) -> Result<f64> {
        schedule_value(self, t, epoch)
    }

    pub fn label(&self) -> String {
        match *self {
            Schedule::Constant { base } => format!("constant({base})"),
            Schedule::ExpDecay { base, rate } => format!("exp_decay({base},{rate})"),
            Schedule::InverseT { base, mu, offset } => format!("inverse_t({base},{mu},{offset})"),
            Schedule::InverseTSquared { base, mu, offset } => {
                format!("inverse_t_squared({base},{mu},{offset})")
            }
        }
    }
}

pub fn schedule_value(schedule: &Schedule, t: u64, epoch: u64) -> Result<f64> {
    if t < 1 {
        return Err(Error::invalid("schedule step index must be >= 1"));
    }
    let shifted = |mu: f64, offset: u8| (t - u64::from(offset)) as f64 + mu;
    Ok(match *schedule {
        Schedule::Constant { base } => base,
        Schedule::ExpDecay { base, rate } => base * rate.powi(epoch.min(i32::MAX as u64) as i32),
        Schedule::InverseT { base, mu, offset } => base / shifted(mu, offset),
        Schedule::InverseTSquared { base, mu, offset } => base / shifted(mu, offset).powi(2),
    })
}
