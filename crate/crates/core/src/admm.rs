//! Raw ADMM iteration for ℓ0-regularised least squares after splitting
//! `A x + r = b`, and the closed-form x-update that removes `r` and `y`.
//!
//! This module is an oracle. It runs a fixed number of iterations and
//! exists to confirm that the recursion-free update reproduces the ADMM
//! iterates; no stopping rule or tuning lives here.

use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::linalg::{axpy, max_abs_diff, DenseVector};
use crate::problem::ProblemInstance;
use crate::sparse::{hard_threshold_by_value, residual};

/// Distance to the hard threshold below which a run is reported as
/// inconclusive instead of compared.
pub const BOUNDARY_MARGIN: f64 = 1e-9;

/// `α` penalises the residual, `β` is the augmented-Lagrangian penalty and
/// `τ` the proximal step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmmParams {
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
}

impl AdmmParams {
    pub fn new(alpha: f64, beta: f64, tau: f64) -> Result<Self> {
        let p = Self { alpha, beta, tau };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("tau", self.tau)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// The product `αβ`, the only way `α` and `β` enter the x-update.
    pub fn gamma(&self) -> f64 {
        self.alpha * self.beta
    }

    /// `sqrt(2τ/β)`.
    pub fn threshold(&self) -> f64 {
        (2.0 * self.tau / self.beta).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState {
    pub x: DenseVector,
    /// Splitting variable, length `m`.
    pub r: DenseVector,
    /// Multiplier, length `m`.
    pub y: DenseVector,
    pub k: usize,
}

impl AdmmState {
    /// `(x0, r = 0, y = 0)` at `k = 0`.
    pub fn initial(x0: DenseVector, m: usize) -> Self {
        Self {
            x: x0,
            r: DenseVector::zeros(m),
            y: DenseVector::zeros(m),
            k: 0,
        }
    }
}

fn check_state(problem: &ProblemInstance, state: &AdmmState) -> Result<()> {
    check_len("x", problem.n(), state.x.len())?;
    check_len("r", problem.m(), state.r.len())?;
    check_len("y", problem.m(), state.y.len())
}

/// One ADMM step, also returning the vector fed to `hard(·, sqrt(2τ/β))`.
fn step_with_pre(
    problem: &ProblemInstance,
    state: &AdmmState,
    params: &AdmmParams,
) -> Result<(AdmmState, Vec<f64>)> {
    params.validate()?;
    check_state(problem, state)?;
    let (a, b) = (&problem.a, &problem.b);
    let gamma = params.gamma();

    let c = residual(a, &state.x, b)?;
    let w = gamma / (1.0 + gamma);
    let r: Vec<f64> = state
        .y
        .iter()
        .zip(c.iter())
        .map(|(yi, ci)| w * (yi / params.beta + ci))
        .collect();

    let mut pre = state.x.to_vec();
    axpy(params.tau / gamma, &a.tr_mul_vec(&r)?, &mut pre);
    let x = hard_threshold_by_value(&pre, params.threshold())?;

    let ax = a.mul_vec(&x)?;
    let y: Vec<f64> = state
        .y
        .iter()
        .zip(ax.iter().zip(&r).zip(b.iter()))
        .map(|(yi, ((axi, ri), bi))| yi - params.beta * (axi + ri - bi))
        .collect();

    Ok((
        AdmmState {
            x,
            r: r.into(),
            y: y.into(),
            k: state.k + 1,
        },
        pre,
    ))
}

/// One iteration: `r ← αβ/(1+αβ)(y/β + b − A x)`,
/// `x ← hard(x + τ/(αβ) Aᵀr, sqrt(2τ/β))`, `y ← y − β(A x + r − b)`.
pub fn admm_l0_step(
    problem: &ProblemInstance,
    state: &AdmmState,
    params: &AdmmParams,
) -> Result<AdmmState> {
    step_with_pre(problem, state, params).map(|(s, _)| s)
}

/// Runs `max_iters` steps from `(x0, y = 0)` and returns all `max_iters + 1` states.
pub fn run_admm_l0(
    problem: &ProblemInstance,
    params: &AdmmParams,
    x0: DenseVector,
    max_iters: usize,
) -> Result<Vec<AdmmState>> {
    if max_iters < 1 {
        return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
    }
    let mut traj = Vec::with_capacity(max_iters + 1);
    traj.push(AdmmState::initial(x0, problem.m()));
    for _ in 0..max_iters {
        let next = admm_l0_step(problem, traj.last().unwrap(), params)?;
        traj.push(next);
    }
    Ok(traj)
}

/// Argument of the hard threshold in the unrolled update, built from
/// `x(0..=k)` alone.
fn unrolled_pre(
    problem: &ProblemInstance,
    params: &AdmmParams,
    history: &[DenseVector],
    k: usize,
) -> Result<Vec<f64>> {
    params.validate()?;
    if k < 1 {
        return Err(Error::InvalidArgument("unrolled update needs k >= 1".into()));
    }
    if history.len() < k + 1 {
        return Err(Error::InvalidArgument(format!(
            "history holds {} iterates, need x(0)..x({k})",
            history.len()
        )));
    }
    let (a, b) = (&problem.a, &problem.b);
    let (gamma, tau) = (params.gamma(), params.tau);
    let g1 = 1.0 + gamma;
    let m = problem.m();

    // Combine the residuals first, then apply Aᵀ once.
    let mut comb = vec![0.0; m];
    axpy(2.0 * tau / g1, &residual(a, &history[k], b)?, &mut comb);
    for (i, xi) in history.iter().enumerate().take(k).skip(1) {
        let coef = tau * (1.0 - gamma) / g1.powi((k + 1 - i) as i32);
        axpy(coef, &residual(a, xi, b)?, &mut comb);
    }
    axpy(
        -gamma * tau / g1.powi(k as i32 + 1),
        &residual(a, &history[0], b)?,
        &mut comb,
    );
    let mut pre = history[k].to_vec();
    axpy(1.0, &a.tr_mul_vec(&comb)?, &mut pre);
    Ok(pre)
}

/// `x(k+1)` computed from the x-history only, without `r` or `y`:
///
/// `hard(x(k) + 2τ/(1+αβ) Aᵀc(k) + τ(1−αβ) Σ_{i=1}^{k−1} (1+αβ)^{−(k+1−i)} Aᵀc(i)
///  − αβτ/(1+αβ)^{k+1} Aᵀc(0), sqrt(2τ/β))` with `c(i) = b − A x(i)`.
pub fn unrolled_x_update(
    problem: &ProblemInstance,
    params: &AdmmParams,
    history: &[DenseVector],
    k: usize,
) -> Result<DenseVector> {
    let pre = unrolled_pre(problem, params, history, k)?;
    hard_threshold_by_value(&pre, params.threshold())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// `max_k ‖x_admm(k+1) − x_unrolled(k+1)‖∞`.
    pub max_deviation: f64,
    /// Deviation for `k = 1 .. iters−1`.
    pub per_step: Vec<f64>,
    /// Smallest distance of any pre-threshold magnitude to the threshold.
    pub min_boundary_distance: f64,
    /// Set when some thresholding decision was within [`BOUNDARY_MARGIN`].
    pub boundary_inconclusive: bool,
}

impl EquivalenceReport {
    /// True when the run is conclusive and the deviation is within `tol`.
    pub fn passes(&self, tol: f64) -> bool {
        !self.boundary_inconclusive && self.max_deviation <= tol
    }
}

fn boundary_distance(pre: &[f64], threshold: f64) -> f64 {
    pre.iter()
        .map(|v| (v.abs() - threshold).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Runs ADMM for `iters` steps and recomputes every `x(k+1)`, `k ≥ 1`, from
/// the x-history through [`unrolled_x_update`].
pub fn check_unrolled_equivalence(
    problem: &ProblemInstance,
    params: &AdmmParams,
    x0: DenseVector,
    iters: usize,
) -> Result<EquivalenceReport> {
    if iters < 2 {
        return Err(Error::InvalidArgument("equivalence check needs iters >= 2".into()));
    }
    params.validate()?;
    let thr = params.threshold();
    let mut states = vec![AdmmState::initial(x0, problem.m())];
    let mut min_dist = f64::INFINITY;
    for k in 0..iters {
        let (next, pre) = step_with_pre(problem, &states[k], params)?;
        if k >= 1 {
            min_dist = min_dist.min(boundary_distance(&pre, thr));
        }
        states.push(next);
    }
    let history: Vec<DenseVector> = states.iter().map(|s| s.x.clone()).collect();

    let mut per_step = Vec::with_capacity(iters - 1);
    for k in 1..iters {
        let pre = unrolled_pre(problem, params, &history, k)?;
        min_dist = min_dist.min(boundary_distance(&pre, thr));
        let x = hard_threshold_by_value(&pre, thr)?;
        per_step.push(max_abs_diff(&x, &history[k + 1]));
    }
    Ok(EquivalenceReport {
        max_deviation: per_step.iter().copied().fold(0.0, f64::max),
        per_step,
        min_boundary_distance: min_dist,
        boundary_inconclusive: min_dist <= BOUNDARY_MARGIN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    fn small_problem() -> ProblemInstance {
        let a = DenseMatrix::from_rows(&[
            vec![0.9, 0.1, -0.2, 0.3],
            vec![0.2, 1.1, 0.1, -0.4],
            vec![-0.1, 0.3, 0.8, 0.5],
        ])
        .unwrap();
        ProblemInstance::noiseless(a, vec![3.0, 0.0, -2.5, 0.0].into()).unwrap()
    }

    #[test]
    fn rejects_non_positive_params() {
        assert!(AdmmParams::new(0.0, 1.0, 1.0).is_err());
        assert!(AdmmParams::new(1.0, -1.0, 1.0).is_err());
        assert!(AdmmParams::new(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn truth_start_has_zero_split_variable() {
        let p = small_problem();
        let params = AdmmParams::new(1.0, 1.0, 1.0).unwrap();
        let truth = p.truth.clone().unwrap();
        let s0 = AdmmState::initial(truth.clone(), p.m());
        let s1 = admm_l0_step(&p, &s0, &params).unwrap();
        assert!(s1.r.norm_inf() < 1e-15);
        let expected = hard_threshold_by_value(&truth, params.threshold()).unwrap();
        assert!(max_abs_diff(&s1.x, &expected) < 1e-15);
        assert_eq!(s1.k, 1);
    }

    #[test]
    fn origin_is_a_fixed_point() {
        let a = small_problem().a;
        let p = ProblemInstance::new(a, DenseVector::zeros(3)).unwrap();
        let params = AdmmParams::new(0.5, 2.0, 0.3).unwrap();
        let traj = run_admm_l0(&p, &params, DenseVector::zeros(4), 10).unwrap();
        assert_eq!(traj.len(), 11);
        for s in &traj {
            assert_eq!(s.x.norm_inf(), 0.0);
            assert_eq!(s.r.norm_inf(), 0.0);
            assert_eq!(s.y.norm_inf(), 0.0);
        }
    }

    #[test]
    fn one_iteration_run_equals_one_step() {
        let p = small_problem();
        let params = AdmmParams::new(1.0, 1.0, 1.0).unwrap();
        let traj = run_admm_l0(&p, &params, DenseVector::zeros(4), 1).unwrap();
        let step = admm_l0_step(&p, &AdmmState::initial(DenseVector::zeros(4), 3), &params).unwrap();
        assert_eq!(traj[1], step);
        assert!(run_admm_l0(&p, &params, DenseVector::zeros(4), 0).is_err());
    }

    #[test]
    fn truth_start_stays_fixed_when_entries_clear_threshold() {
        // |truth_i| ≥ 2.5 > sqrt(2τ/β) = sqrt(2): residual stays zero forever.
        let p = small_problem();
        let params = AdmmParams::new(1.0, 1.0, 1.0).unwrap();
        let truth = p.truth.clone().unwrap();
        let traj = run_admm_l0(&p, &params, truth.clone(), 6).unwrap();
        for s in &traj {
            assert!(max_abs_diff(&s.x, &truth) < 1e-14);
        }
    }

    #[test]
    fn unrolled_requires_k_at_least_one() {
        let p = small_problem();
        let params = AdmmParams::new(1.0, 1.0, 1.0).unwrap();
        let h = vec![DenseVector::zeros(4); 3];
        assert!(unrolled_x_update(&p, &params, &h, 0).is_err());
        assert!(unrolled_x_update(&p, &params, &h, 3).is_err());
        assert!(check_unrolled_equivalence(&p, &params, DenseVector::zeros(4), 1).is_err());
    }

    #[test]
    fn zero_problem_has_zero_deviation() {
        let a = small_problem().a;
        let p = ProblemInstance::new(a, DenseVector::zeros(3)).unwrap();
        let params = AdmmParams::new(1.0, 1.0, 1.0).unwrap();
        let rep = check_unrolled_equivalence(&p, &params, DenseVector::zeros(4), 8).unwrap();
        assert_eq!(rep.max_deviation, 0.0);
        assert_eq!(rep.per_step.len(), 7);
    }
}
