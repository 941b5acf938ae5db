//! IAD written without memory vectors: every step sums the past residuals
//! explicitly. Used to cross-check the `u`/`v` recursion.

use serde::Serialize;

use super::{iad_init, iad_step, Algorithm, SolverConfig};
use crate::admm::BOUNDARY_MARGIN;
use crate::error::{Error, Result};
use crate::linalg::{axpy, max_abs_diff, DenseVector};
use crate::problem::ProblemInstance;
use crate::sparse::{hard_threshold_top_s, residual, top_s_gap};

/// Argument of `H_s` for `x(k+1)`, `k ≥ 1`:
///
/// `x(k) + μ Aᵀ[c(k) + (1−γ)/(2(1+γ)) Σ_{i=1}^{k−1} (1+γ)^{−(k−1−i)} c(i) − γ/(2(1+γ)ᵏ) c(0)]`
/// with `c(i) = b − A x(i)`.
fn explicit_pre(
    problem: &ProblemInstance,
    mu: f64,
    gamma: f64,
    history: &[DenseVector],
    k: usize,
) -> Result<Vec<f64>> {
    if k < 1 || history.len() < k + 1 {
        return Err(Error::InvalidArgument(format!(
            "explicit update for x({}) needs x(0)..x({k}) with k >= 1",
            k + 1
        )));
    }
    let (a, b) = (&problem.a, &problem.b);
    let g1 = 1.0 + gamma;
    let mut comb = residual(a, &history[k], b)?.into_vec();
    for (i, xi) in history.iter().enumerate().take(k).skip(1) {
        let coef = (1.0 - gamma) / (2.0 * g1) / g1.powi((k - 1 - i) as i32);
        axpy(coef, &residual(a, xi, b)?, &mut comb);
    }
    axpy(-gamma / (2.0 * g1.powi(k as i32)), &residual(a, &history[0], b)?, &mut comb);
    let mut pre = history[k].to_vec();
    axpy(mu, &a.tr_mul_vec(&comb)?, &mut pre);
    Ok(pre)
}

/// `x(k+1)` of IAD computed from `x(0..=k)` alone.
pub fn iad_explicit_update(
    problem: &ProblemInstance,
    config: &SolverConfig,
    history: &[DenseVector],
    k: usize,
) -> Result<DenseVector> {
    let pre = explicit_pre(problem, config.mu, config.gamma, history, k)?;
    hard_threshold_top_s(&pre, config.s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplicitReport {
    /// `max_k ‖x_recursive(k+1) − x_explicit(k+1)‖∞`.
    pub max_deviation: f64,
    /// Smallest gap between the `s`-th and `(s+1)`-th magnitudes fed to `H_s`.
    pub min_selection_gap: f64,
    /// Set when some `H_s` selection was within [`BOUNDARY_MARGIN`] of a tie.
    pub boundary_inconclusive: bool,
}

impl ExplicitReport {
    pub fn passes(&self, tol: f64) -> bool {
        !self.boundary_inconclusive && self.max_deviation <= tol
    }
}

/// Runs `iters` IAD iterations through the `u`/`v` recursion and recomputes
/// each `x(k+1)`, `k ≥ 1`, from the stored x-history.
pub fn check_explicit_iad(problem: &ProblemInstance, config: &SolverConfig, iters: usize) -> Result<ExplicitReport> {
    if config.algorithm != Algorithm::Iad {
        return Err(Error::InvalidArgument(format!(
            "explicit form exists for iad, got {}",
            config.algorithm
        )));
    }
    if iters < 2 {
        return Err(Error::InvalidArgument("explicit check needs iters >= 2".into()));
    }
    let mut state = iad_init(problem, config)?;
    let mut history = vec![config.start(problem.n()), state.x.clone()];
    let mut max_dev = 0.0f64;
    let mut min_gap = f64::INFINITY;
    for k in 1..iters {
        let pre = explicit_pre(problem, config.mu, config.gamma, &history, k)?;
        min_gap = min_gap.min(top_s_gap(&pre, config.s));
        let explicit = hard_threshold_top_s(&pre, config.s)?;
        state = iad_step(problem, &state, config)?;
        max_dev = max_dev.max(max_abs_diff(&explicit, &state.x));
        history.push(state.x.clone());
    }
    Ok(ExplicitReport {
        max_deviation: max_dev,
        min_selection_gap: min_gap,
        boundary_inconclusive: min_gap <= BOUNDARY_MARGIN,
    })
}
