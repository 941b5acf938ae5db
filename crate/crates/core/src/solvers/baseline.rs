//! IHT, NIHT and HTP. Memory vectors stay zero throughout.

use super::alternating::normalized_step;
use super::{neg_gradient, IterState, SolverConfig};
use crate::error::Result;
use crate::linalg::{DenseVector, IndexSet};
use crate::lstsq::least_squares_on_support;
use crate::problem::ProblemInstance;
use crate::sparse::{hard_threshold_top_s, support, top_s_indices};

fn start(problem: &ProblemInstance, config: &SolverConfig) -> Result<IterState> {
    config.validate(problem.n())?;
    IterState::start(problem, config.start(problem.n()), config.mu)
}

fn finish(problem: &ProblemInstance, x: DenseVector, mu: f64, k: usize) -> Result<IterState> {
    let n = problem.n();
    IterState::next(problem, x, DenseVector::zeros(n), DenseVector::zeros(n), mu, k)
}

pub fn iht_init(problem: &ProblemInstance, config: &SolverConfig) -> Result<IterState> {
    iht_step(problem, &start(problem, config)?, config)
}

/// `x(k+1) = H_s(x(k) − μ∇f(x(k)))`.
pub fn iht_step(problem: &ProblemInstance, state: &IterState, config: &SolverConfig) -> Result<IterState> {
    let g = neg_gradient(problem, state)?;
    let pre: Vec<f64> = state
        .x
        .iter()
        .zip(&g)
        .map(|(xi, gi)| xi + config.mu * gi)
        .collect();
    let x = hard_threshold_top_s(&pre, config.s)?;
    finish(problem, x, config.mu, state.k + 1)
}

pub fn niht_init(problem: &ProblemInstance, config: &SolverConfig) -> Result<IterState> {
    niht_step(problem, &start(problem, config)?, config)
}

/// Gradient step with `μ = ‖(∇f)_S‖² / ‖A(∇f)_S‖²` on `S = S(k)`; from an
/// empty support (the zero start) `S` is the support of `H_s(−∇f)`.
pub fn niht_step(problem: &ProblemInstance, state: &IterState, config: &SolverConfig) -> Result<IterState> {
    let g = neg_gradient(problem, state)?;
    let s = if state.support.is_empty() {
        IndexSet::new(top_s_indices(&g, config.s)?, problem.n())?
    } else {
        state.support.clone()
    };
    let mu = normalized_step(problem, &g, &s, state.k)?;
    let pre: Vec<f64> = state.x.iter().zip(&g).map(|(xi, gi)| xi + mu * gi).collect();
    let x = hard_threshold_top_s(&pre, config.s)?;
    finish(problem, x, mu, state.k + 1)
}

pub fn htp_init(problem: &ProblemInstance, config: &SolverConfig) -> Result<IterState> {
    htp_step(problem, &start(problem, config)?, config)
}

/// `S = supp(H_s(x(k) − ∇f(x(k))))`, `x(k+1)` = least squares on `S`.
pub fn htp_step(problem: &ProblemInstance, state: &IterState, config: &SolverConfig) -> Result<IterState> {
    let g = neg_gradient(problem, state)?;
    let pre: Vec<f64> = state.x.iter().zip(&g).map(|(xi, gi)| xi + 1.0 * gi).collect();
    let w = hard_threshold_top_s(&pre, config.s)?;
    let x = least_squares_on_support(&problem.a, &problem.b, &support(&w))?;
    finish(problem, x, 1.0, state.k + 1)
}
