//! Numerical counterparts of the convergence analysis for projected
//! pseudo-linear TO on a strongly convex objective.
//!
//! Given a feasible ball of radius `D_w` and step sizes
//! `γ_t = γ/(t+μ)`, `β_t = β/(t−1+μ)`, `α_t = α/(t−1+μ)²`, the stochastic
//! gradients, `‖A_t‖₂` and `‖b_t‖₂` stay below the constants computed here, and
//! both `E‖w_t − w*‖²` and `E‖Ĝ_t − ∇F(w_t)‖²` decay like `1/(t+μ)`.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::optim::{OptimizerState, Schedule};
use crate::problems::Problem;
use crate::{Error, Matrix, Result, Vector};

/// Uniform bounds along a projected TO trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub d_w: f64,
    pub d_g: f64,
    pub d_a: f64,
    pub d_b: f64,
    pub s_alpha: f64,
    pub l: f64,
    pub c: f64,
}

/// `D_G = 2·L·D_w + max_B ‖∇F^B(w*)‖₂`.
pub fn compute_dg(l: f64, d_w: f64, max_batch_grad_at_opt: f64) -> f64 {
    2.0 * l * d_w + max_batch_grad_at_opt
}

/// `(D_A, D_b)` from the initial norms, `S_α = Σ α_s`, `D_w` and `D_G`.
pub fn compute_da_db(
    norm_a0: f64,
    norm_b0: f64,
    s_alpha: f64,
    d_w: f64,
    d_g: f64,
) -> Result<(f64, f64)> {
    let k = s_alpha * d_w * d_w;
    if !(k < 1.0) {
        return Err(Error::InfeasibleConstants(k));
    }
    let d_b = norm_b0.max((d_g * (1.0 + k) + norm_a0 * d_w) / (1.0 - k));
    let d_a = norm_a0 + s_alpha * d_w * (d_b + d_g);
    Ok((d_a, d_b))
}

const S_ALPHA_TERMS: u64 = 1_000_000;

/// Upper bound on `Σ_{s≥1} α/(s−1+μ)²`: exact partial sum over the first 10⁶
/// terms plus the integral bound `1/(K−1+μ)` on the tail.
pub fn s_alpha(alpha: f64, mu: f64) -> f64 {
    if alpha == 0.0 {
        return 0.0;
    }
    if !(mu > 0.0) {
        return f64::INFINITY;
    }
    // Summed smallest-first to limit rounding error.
    let partial: f64 = (0..S_ALPHA_TERMS)
        .rev()
        .map(|k| 1.0 / (k as f64 + mu).powi(2))
        .sum();
    let tail = 1.0 / (S_ALPHA_TERMS as f64 - 1.0 + mu);
    alpha * (partial + tail)
}

/// Step-size constants `γ_t = γ/(t+μ)`, `β_t = β/(t−1+μ)`, `α_t = α/(t−1+μ)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Config {
    pub gamma: f64,
    pub beta: f64,
    pub alpha: f64,
    pub mu: f64,
}

impl Theorem1Config {
    pub fn gamma_schedule(&self) -> Schedule {
        Schedule::InverseT {
            base: self.gamma,
            mu: self.mu,
            offset: 0,
        }
    }

    pub fn beta_schedule(&self) -> Schedule {
        Schedule::InverseT {
            base: self.beta,
            mu: self.mu,
            offset: 1,
        }
    }

    pub fn alpha_schedule(&self) -> Schedule {
        Schedule::InverseTSquared {
            base: self.alpha,
            mu: self.mu,
            offset: 1,
        }
    }

    /// `δ = α·D_w²/μ + β`; along the run `δ_t = α_t‖w_t‖² + β_t < δ/(t−1+μ)`.
    pub fn delta(&self, d_w: f64) -> f64 {
        self.alpha * d_w * d_w / self.mu + self.beta
    }

    /// Lower bound the `β` constant must exceed, `None` when `γc ≤ 1` (undefined).
    pub fn beta_lower_bound(&self, c: f64, l: f64, d_a: f64) -> Option<f64> {
        let gc = self.gamma * c;
        if gc <= 1.0 {
            return None;
        }
        let root = (d_a * d_a + l * l).sqrt();
        Some(
            1.0 + 4.0 * self.gamma.powi(2) * l * l * root / (c * (gc - 1.0))
                + 2.0 * self.gamma * root,
        )
    }
}

/// Named hypotheses on the step-size constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `γ > 1/c`
    GammaAboveInverseC,
    /// `β` above its lower bound
    BetaLowerBound,
    /// `Σ α_s < 1/D_w²`
    AlphaSummable,
    /// `α₁ < 1`
    AlphaFirst,
    /// `β₁ < 1`
    BetaFirst,
    /// `γ₁ < 1`
    GammaFirst,
    /// `αD_w²/μ + β < μ`
    MuLargeEnough,
}

impl Condition {
    pub const ALL: [Condition; 7] = [
        Condition::GammaAboveInverseC,
        Condition::BetaLowerBound,
        Condition::AlphaSummable,
        Condition::AlphaFirst,
        Condition::BetaFirst,
        Condition::GammaFirst,
        Condition::MuLargeEnough,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::GammaAboveInverseC => "gamma > 1/c",
            Condition::BetaLowerBound => {
                "beta > 1 + 4 gamma^2 L^2 sqrt(D_A^2+L^2)/(c(gamma c-1)) + 2 gamma sqrt(D_A^2+L^2)"
            }
            Condition::AlphaSummable => "sum_s alpha_s < 1/D_w^2",
            Condition::AlphaFirst => "alpha_1 < 1",
            Condition::BetaFirst => "beta_1 < 1",
            Condition::GammaFirst => "gamma_1 < 1",
            Condition::MuLargeEnough => "alpha D_w^2/mu + beta < mu",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub valid: bool,
    pub failed: Vec<Condition>,
    /// Conditions that could not be evaluated because a prerequisite failed
    /// (the `β` bound is undefined unless `γc > 1`).
    pub skipped: Vec<Condition>,
    pub beta_lower_bound: Option<f64>,
    pub s_alpha: f64,
}

/// Margin folded into the strict `Σ α_s < 1/D_w²` check.
const SUM_MARGIN: f64 = 1e-9;

pub fn validate_theorem1(
    cfg: &Theorem1Config,
    c: f64,
    l: f64,
    d_a: f64,
    d_w: f64,
) -> Theorem1Report {
    let mut failed = Vec::new();
    let mut skipped = Vec::new();
    let mut check = |cond: Condition, ok: bool| {
        if !ok {
            failed.push(cond);
        }
    };

    check(
        Condition::GammaAboveInverseC,
        c > 0.0 && cfg.gamma > 1.0 / c,
    );
    let beta_bound = cfg.beta_lower_bound(c, l, d_a);
    match beta_bound {
        Some(bound) => check(Condition::BetaLowerBound, cfg.beta > bound),
        None => skipped.push(Condition::BetaLowerBound),
    }
    let s = s_alpha(cfg.alpha, cfg.mu);
    check(Condition::AlphaSummable, s * d_w * d_w < 1.0 - SUM_MARGIN);
    check(Condition::AlphaFirst, cfg.alpha / cfg.mu.powi(2) < 1.0);
    check(Condition::BetaFirst, cfg.beta / cfg.mu < 1.0);
    check(Condition::GammaFirst, cfg.gamma / (1.0 + cfg.mu) < 1.0);
    check(
        Condition::MuLargeEnough,
        cfg.alpha * d_w * d_w / cfg.mu + cfg.beta < cfg.mu,
    );

    Theorem1Report {
        valid: failed.is_empty() && skipped.is_empty(),
        failed,
        skipped,
        beta_lower_bound: beta_bound,
        s_alpha: s,
    }
}

/// A validated configuration together with the constants it was derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Setup {
    pub config: Theorem1Config,
    pub constants: BoundConstants,
    pub report: Theorem1Report,
}

/// Tunables for [`derive_theorem1`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Theorem1Tuning {
    /// `γ` in units of `1/c`; must exceed 1.
    pub gamma_factor: f64,
    /// Target for `S_α·D_w²`, in `(0, 1)`; small values keep `D_A` small.
    pub alpha_budget: f64,
    /// Relative slack of `β` above its lower bound.
    pub beta_margin: f64,
}

impl Default for Theorem1Tuning {
    fn default() -> Self {
        Theorem1Tuning {
            gamma_factor: 1.1,
            alpha_budget: 0.01,
            beta_margin: 0.01,
        }
    }
}

/// Picks `(γ, β, α, μ)` satisfying every hypothesis for the given problem
/// constants, starting from zero-initialized `A` and `b`.
pub fn derive_theorem1(
    c: f64,
    l: f64,
    d_w: f64,
    d_g: f64,
    tuning: Theorem1Tuning,
) -> Result<Theorem1Setup> {
    let Theorem1Tuning {
        gamma_factor,
        alpha_budget,
        beta_margin,
    } = tuning;
    if !(c > 0.0 && l >= c && d_w > 0.0 && d_g >= 0.0) {
        return Err(Error::invalid(format!(
            "need c > 0, L >= c, D_w > 0, D_G >= 0 (got c = {c}, L = {l}, D_w = {d_w}, D_G = {d_g})"
        )));
    }
    if !(gamma_factor > 1.0 && alpha_budget > 0.0 && alpha_budget < 1.0 && beta_margin > 0.0) {
        return Err(Error::invalid(
            "need gamma_factor > 1, alpha_budget in (0, 1), beta_margin > 0",
        ));
    }
    let gamma = gamma_factor / c;
    // S_α·D_w² is pinned to the budget, which fixes D_A and D_b independently of μ.
    let s_target = alpha_budget / (d_w * d_w);
    let (d_a, d_b) = compute_da_db(0.0, 0.0, s_target, d_w, d_g)?;
    let probe = Theorem1Config {
        gamma,
        beta: 0.0,
        alpha: 0.0,
        mu: 1.0,
    };
    let beta = probe.beta_lower_bound(c, l, d_a).expect("gamma c > 1") * (1.0 + beta_margin);

    let mut mu = beta + alpha_budget + 1.0;
    let mut alpha = 0.0;
    for _ in 0..50 {
        // s_alpha is linear in α; solve for the α hitting the budget at this μ.
        alpha = s_target / s_alpha(1.0, mu);
        let needed = (beta + alpha * d_w * d_w / mu) * (1.0 + 1e-6) + 1.0;
        let needed = needed.max(gamma).max(alpha.sqrt() + 1.0);
        if needed <= mu {
            break;
        }
        mu = needed.ceil();
    }
    let config = Theorem1Config {
        gamma,
        beta,
        alpha,
        mu,
    };
    let report = validate_theorem1(&config, c, l, d_a, d_w);
    if !report.valid {
        return Err(Error::invalid(format!(
            "derived configuration fails {:?}",
            report.failed
        )));
    }
    Ok(Theorem1Setup {
        config,
        constants: BoundConstants {
            d_w,
            d_g,
            d_a,
            d_b,
            s_alpha: report.s_alpha,
            l,
            c,
        },
        report,
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Largest subset count enumerated exactly by [`max_batch_grad_norm`].
pub const EXHAUSTIVE_SUBSET_LIMIT: f64 = 2.0e5;

/// `max_B ‖∇F^B(w)‖₂` over all size-`b` subsets.
///
/// Exact by enumeration when `C(N, b)` is at most [`EXHAUSTIVE_SUBSET_LIMIT`];
/// otherwise the triangle-inequality bound (mean of the `b` largest per-sample
/// gradient norms), which is never smaller than the true maximum.
pub fn max_batch_grad_norm(problem: &dyn Problem, w: &Vector, b: usize) -> Result<f64> {
    let n = problem.n_samples();
    if b == 0 || b > n {
        return Err(Error::invalid(format!("batch size {b} outside 1..={n}")));
    }
    if binomial(n, b) <= EXHAUSTIVE_SUBSET_LIMIT {
        let mut best = 0.0f64;
        for_each_subset(n, b, |subset| {
            best = best.max(problem.minibatch_grad(w, subset).norm());
        });
        Ok(best)
    } else {
        let mut norms: Vec<f64> = (0..n)
            .map(|i| problem.minibatch_grad(w, &[i]).norm())
            .collect();
        norms.sort_by(|a, c| c.total_cmp(a));
        Ok(norms[..b].iter().sum::<f64>() / b as f64)
    }
}

/// Calls `f` with every size-`k` subset of `0..n` in lexicographic order.
pub fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub const SPECTRAL_TOL: f64 = 1e-10;
pub const SPECTRAL_MAX_ITER: usize = 1000;

/// Largest singular value by power iteration on `MᵀM`.
pub fn spectral_norm(m: &Matrix) -> Result<f64> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("spectral_norm: non-finite entry"));
    }
    if m.is_empty() || m.amax() == 0.0 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v = Vector::from_fn(m.ncols(), |_, _| StandardNormal.sample(&mut rng));
    v.normalize_mut();
    let mut estimate = 0.0;
    for _ in 0..SPECTRAL_MAX_ITER {
        let mv = m * &v;
        let next = mv.norm();
        let mut u = m.transpose() * mv;
        let un = u.norm();
        if un == 0.0 {
            // v landed in the null space; restart from a fresh direction.
            v = Vector::from_fn(m.ncols(), |_, _| StandardNormal.sample(&mut rng));
            v.normalize_mut();
            continue;
        }
        u /= un;
        v = u;
        if (next - estimate).abs() <= SPECTRAL_TOL * next {
            return Ok(next);
        }
        estimate = next;
    }
    Err(Error::NoConvergence {
        iterations: SPECTRAL_MAX_ITER,
        estimate,
    })
}

/// Spectral norm of the matrix an optimizer state represents: dense `A`,
/// `max|a_i|` for the diagonal variant, `‖a‖·‖c‖` for the rank-one variant.
/// `None` for baselines.
pub fn state_matrix_norm(state: &OptimizerState) -> Option<Result<f64>> {
    match state {
        OptimizerState::PseudoLinear(s) => Some(spectral_norm(&s.a)),
        OptimizerState::Diagonal(s) => Some(Ok(s.a.amax())),
        OptimizerState::RankOne(s) => Some(Ok(s.a.norm() * s.c.norm())),
        OptimizerState::Baseline(_) => None,
    }
}

/// `‖b‖₂` of a TO state, `None` for baselines.
pub fn state_offset_norm(state: &OptimizerState) -> Option<f64> {
    match state {
        OptimizerState::PseudoLinear(s) => Some(s.b.norm()),
        OptimizerState::Diagonal(s) => Some(s.b.norm()),
        OptimizerState::RankOne(s) => Some(s.b.norm()),
        OptimizerState::Baseline(_) => None,
    }
}

/// Least-squares fit of `ln value = intercept + slope · ln t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub burn_in_fraction: f64,
}

pub const DEFAULT_BURN_IN: f64 = 0.1;
pub const MIN_FIT_POINTS: usize = 10;

/// Fits a power law to `(t, value)` pairs with `t > burn_in_fraction · max t`.
pub fn rate_fit(series: &[(f64, f64)], burn_in_fraction: f64) -> Result<RateFit> {
    if !(0.0..1.0).contains(&burn_in_fraction) {
        return Err(Error::invalid(format!(
            "burn-in fraction must lie in [0, 1), got {burn_in_fraction}"
        )));
    }
    if let Some(&(t, v)) = series.iter().find(|(t, v)| !(*v > 0.0) || !(*t > 0.0)) {
        return Err(Error::invalid(format!(
            "rate_fit needs positive t and values, found ({t}, {v})"
        )));
    }
    let t_max = series.iter().map(|p| p.0).fold(0.0, f64::max);
    let cutoff = burn_in_fraction * t_max;
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, _)| *t > cutoff)
        .map(|(t, v)| (t.ln(), v.ln()))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::invalid(format!(
            "rate_fit needs at least {MIN_FIT_POINTS} points after burn-in, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("rate_fit needs at least two distinct t"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        burn_in_fraction,
    })
}
