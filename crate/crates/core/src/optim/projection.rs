use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vector};

/// Closed convex set the iterates are projected onto.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeasibleSet {
    #[default]
    Unconstrained,
    /// Euclidean ball of the given radius centred at the origin.
    L2Ball { radius: f64 },
}

impl FeasibleSet {
    pub fn ball(radius: f64) -> Result<Self> {
        let set = FeasibleSet::L2Ball { radius };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FeasibleSet::L2Ball { radius } if !(radius > 0.0 && radius.is_finite()) => Err(
                Error::invalid(format!("ball radius must be finite and > 0, got {radius}")),
            ),
            _ => Ok(()),
        }
    }

    /// `sup_{w ∈ F} ‖w‖₂`, infinite when unconstrained.
    pub fn radius(&self) -> f64 {
        match *self {
            FeasibleSet::Unconstrained => f64::INFINITY,
            FeasibleSet::L2Ball { radius } => radius,
        }
    }

    pub fn project_in_place(&self, w: &mut Vector) {
        if let FeasibleSet::L2Ball { radius } = *self {
            let norm = w.norm();
            if norm > radius {
                *w *= radius / norm;
            }
        }
    }
}

/// Euclidean projection onto `set`.
pub fn project(w: &Vector, set: &FeasibleSet) -> Vector {
    let mut out = w.clone();
    set.project_in_place(&mut out);
    out
}
