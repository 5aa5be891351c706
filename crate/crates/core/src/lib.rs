//! Trainable optimizers and the tooling to study them.
//!
//! The crate implements three "trainable optimizer" (TO) update rules that learn a
//! pseudo-linear estimate `Ĝ = A·w + b` of the full gradient while the model
//! weights are being trained:
//!
//! - [`optim::FullLinearState`]: dense `A ∈ ℝ^{d×d}`,
//! - [`optim::DiagLinearState`]: `A = diag(a)`,
//! - [`optim::RankOneState`]: `A = a·cᵀ`,
//!
//! alongside the classical SGD / Momentum / Adagrad / RMSProp / ADAM baselines
//! ([`optim::BaselineState`]). Around them sit
//!
//! - [`problems`]: loss and gradient oracles (quadratic, logistic regression, a
//!   two-layer ReLU network) and the per-epoch minibatch sampler,
//! - [`data`]: synthetic generators, LIBSVM and CSV ingestion, standardization,
//! - [`theory`]: boundedness constants, step-size condition checks, spectral
//!   norms and log-log rate fitting,
//! - [`metrics`]: run records and the relative-difference / significance statistics,
//! - [`harness`]: JSON experiment configs, grid expansion, seeded (parallel) runs
//!   and result emission.
//!
//! See the `examples/` directory for one runnable program per capability.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod optim;
pub mod problems;
pub mod theory;

pub use error::{Error, Result};

/// Dense real vector used for weights, gradients and optimizer buffers.
pub type Vector = nalgebra::DVector<f64>;
/// Dense real matrix.
pub type Matrix = nalgebra::DMatrix<f64>;
