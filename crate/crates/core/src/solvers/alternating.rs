//! IAD, NIAD and ADP.
//!
//! With `g(k) = Aᵀ(b − A x(k)) = −∇f(x(k))` every variant moves along
//! `d(k) = g(k) + u(k) − v(k)` and then refreshes the memory:
//!
//! ```text
//! u(k+1) = (1−γ)/(2(1+γ)) · g(k) + u(k)/(1+γ)
//! v(k+1) = v(k)/(1+γ)
//! ```

use super::{neg_gradient, IterState, SolverConfig};
use crate::error::{Error, Result};
use crate::linalg::{norm2, DenseVector, IndexSet};
use crate::lstsq::least_squares_on_support;
use crate::problem::ProblemInstance;
use crate::sparse::{hard_threshold_top_s, restrict, support, top_s_indices};

fn direction(g: &[f64], state: &IterState) -> Vec<f64> {
    g.iter()
        .zip(state.u.iter().zip(state.v.iter()))
        .map(|(gi, (ui, vi))| gi + ui - vi)
        .collect()
}

fn memory_update(g: &[f64], state: &IterState, gamma: f64) -> (DenseVector, DenseVector) {
    let decay = 1.0 / (1.0 + gamma);
    let coef = (1.0 - gamma) / (2.0 * (1.0 + gamma));
    let u = g
        .iter()
        .zip(state.u.iter())
        .map(|(gi, ui)| coef * gi + ui * decay)
        .collect::<Vec<_>>();
    let v = state.v.iter().map(|vi| vi * decay).collect::<Vec<_>>();
    (u.into(), v.into())
}

/// `v(1) = γ/(2(1+γ)) Aᵀ(b − A x(0))`.
fn initial_v(g0: &[f64], gamma: f64) -> DenseVector {
    let coef = gamma / (2.0 * (1.0 + gamma));
    g0.iter().map(|g| coef * g).collect::<Vec<_>>().into()
}

/// `x + step · d`.
fn moved(x: &[f64], step: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(xi, di)| xi + step * di).collect()
}

/// `‖d_S‖² / ‖A d_S‖²`, the exact line-search step along `d_S`.
pub(super) fn normalized_step(
    problem: &ProblemInstance,
    d: &[f64],
    s: &IndexSet,
    iteration: usize,
) -> Result<f64> {
    let d_s = restrict(d, s);
    let num = norm2(&d_s).powi(2);
    let den = norm2(&problem.a.mul_vec(&d_s)?).powi(2);
    if den == 0.0 || !den.is_finite() {
        return Err(Error::DegenerateStep { iteration });
    }
    Ok(num / den)
}

fn start(problem: &ProblemInstance, config: &SolverConfig) -> Result<(IterState, Vec<f64>)> {
    config.validate(problem.n())?;
    let s0 = IterState::start(problem, config.start(problem.n()), config.mu)?;
    let g0 = neg_gradient(problem, &s0)?;
    Ok((s0, g0))
}

/// `x(1) = H_s(x(0) + ½μ Aᵀ(b − A x(0)))`, `u(1) = 0`,
/// `v(1) = γ/(2(1+γ)) Aᵀ(b − A x(0))`.
pub fn iad_init(problem: &ProblemInstance, config: &SolverConfig) -> Result<IterState> {
    let (s0, g0) = start(problem, config)?;
    let x1 = hard_threshold_top_s(&moved(&s0.x, 0.5 * config.mu, &g0), config.s)?;
    let v1 = initial_v(&g0, config.gamma);
    IterState::next(problem, x1, DenseVector::zeros(problem.n()), v1, config.mu, 1)
}

/// `x(k+1) = H_s(x(k) + μ d(k))`.
pub fn iad_step(problem: &ProblemInstance, state: &IterState, config: &SolverConfig) -> Result<IterState> {
    let g = neg_gradient(problem, state)?;
    let d = direction(&g, state);
    let x = hard_threshold_top_s(&moved(&state.x, config.mu, &d), config.s)?;
    let (u, v) = memory_update(&g, state, config.gamma);
    IterState::next(problem, x, u, v, config.mu, state.k + 1)
}

/// NIAD start. From `x(0) = 0` the first step size uses the support of
/// `H_s(Aᵀb)`; from a nonzero start it uses `supp(x(0))`.
pub fn niad_init(problem: &ProblemInstance, config: &SolverConfig) -> Result<IterState> {
    let (s0, g0) = start(problem, config)?;
    let s1 = if s0.support.is_empty() {
        IndexSet::new(top_s_indices(&g0, config.s)?, problem.n())?
    } else {
        s0.support.clone()
    };
    let mu1 = normalized_step(problem, &g0, &s1, 0)?;
    let x1 = hard_threshold_top_s(&moved(&s0.x, 0.5 * mu1, &g0), config.s)?;
    let v1 = initial_v(&g0, config.gamma);
    IterState::next(problem, x1, DenseVector::zeros(problem.n()), v1, mu1, 1)
}

/// `μ(k+1) = ‖d_{S(k)}‖² / ‖A d_{S(k)}‖²`, `x(k+1) = H_s(x(k) + μ(k+1) d(k))`.
pub fn niad_step(problem: &ProblemInstance, state: &IterState, config: &SolverConfig) -> Result<IterState> {
    let g = neg_gradient(problem, state)?;
    let d = direction(&g, state);
    let mu = normalized_step(problem, &d, &state.support, state.k)?;
    let x = hard_threshold_top_s(&moved(&state.x, mu, &d), config.s)?;
    let (u, v) = memory_update(&g, state, config.gamma);
    IterState::next(problem, x, u, v, mu, state.k + 1)
}

/// `w(1) = H_s(x(0) + ½Aᵀ(b − A x(0)))`, then least squares on `supp(w(1))`.
pub fn adp_init(problem: &ProblemInstance, config: &SolverConfig) -> Result<IterState> {
    let (s0, g0) = start(problem, config)?;
    let w1 = hard_threshold_top_s(&moved(&s0.x, 0.5, &g0), config.s)?;
    let x1 = least_squares_on_support(&problem.a, &problem.b, &support(&w1))?;
    let v1 = initial_v(&g0, config.gamma);
    IterState::next(problem, x1, DenseVector::zeros(problem.n()), v1, 1.0, 1)
}

/// `w(k+1) = H_s(x(k) + d(k))`, `x(k+1)` = least squares on `supp(w(k+1))`.
pub fn adp_step(problem: &ProblemInstance, state: &IterState, config: &SolverConfig) -> Result<IterState> {
    let g = neg_gradient(problem, state)?;
    let d = direction(&g, state);
    let w = hard_threshold_top_s(&moved(&state.x, 1.0, &d), config.s)?;
    let x = least_squares_on_support(&problem.a, &problem.b, &support(&w))?;
    let (u, v) = memory_update(&g, state, config.gamma);
    IterState::next(problem, x, u, v, 1.0, state.k + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, DenseMatrix};
    use crate::solvers::Algorithm;

    fn problem() -> ProblemInstance {
        let a = DenseMatrix::from_rows(&[
            vec![0.8, 0.1, -0.3, 0.2, 0.4],
            vec![-0.2, 0.9, 0.2, -0.1, 0.3],
            vec![0.1, -0.3, 0.7, 0.6, -0.2],
        ])
        .unwrap();
        ProblemInstance::noiseless(a, vec![1.0, 0.0, -2.0, 0.0, 0.0].into()).unwrap()
    }

    #[test]
    fn truth_start_is_a_fixed_point_of_init() {
        let p = problem();
        let truth = p.truth.clone().unwrap();
        let cfg = SolverConfig::new(Algorithm::Iad, 2).with_x0(truth.clone());
        let s1 = iad_init(&p, &cfg).unwrap();
        assert!(max_abs_diff(&s1.x, &truth) < 1e-15);
        assert!(s1.v.norm_inf() < 1e-15);
    }

    #[test]
    fn zero_start_init_formulas() {
        let p = problem();
        let cfg = SolverConfig::new(Algorithm::Iad, 2).with_gamma(1.0);
        let s1 = iad_init(&p, &cfg).unwrap();
        let atb = p.a.tr_mul_vec(&p.b).unwrap();
        let half: Vec<f64> = atb.iter().map(|g| 0.5 * g).collect();
        assert_eq!(s1.x, hard_threshold_top_s(&half, 2).unwrap());
        for (v, g) in s1.v.iter().zip(&atb) {
            assert!((v - 0.25 * g).abs() < 1e-15);
        }
        assert_eq!(s1.u.norm_inf(), 0.0);
        assert_eq!(s1.k, 1);
    }

    #[test]
    fn gamma_one_keeps_u_zero_and_halves_v() {
        let p = problem();
        let cfg = SolverConfig::new(Algorithm::Iad, 2).with_gamma(1.0).with_mu(0.5);
        let mut st = iad_init(&p, &cfg).unwrap();
        for _ in 0..6 {
            let next = iad_step(&p, &st, &cfg).unwrap();
            assert_eq!(next.u.norm_inf(), 0.0);
            for (a, b) in next.v.iter().zip(st.v.iter()) {
                assert_eq!(*a, 0.5 * b);
            }
            st = next;
        }
    }

    #[test]
    fn normalized_step_is_one_on_orthonormal_columns() {
        let a = DenseMatrix::identity(3);
        let p = ProblemInstance::new(a, vec![1.0, 2.0, 3.0].into()).unwrap();
        let s = IndexSet::new(vec![0, 2], 3).unwrap();
        assert_eq!(normalized_step(&p, &[0.3, -1.0, 2.0], &s, 1).unwrap(), 1.0);
    }

    #[test]
    fn normalized_step_scales_inverse_square() {
        let p = problem();
        let s = IndexSet::new(vec![0, 2], 5).unwrap();
        let d = [0.3, -1.0, 2.0, 0.5, 0.1];
        let base = normalized_step(&p, &d, &s, 1).unwrap();
        let mut scaled = p.clone();
        scaled.a.scale_column(0, 2.0);
        scaled.a.scale_column(2, 2.0);
        let quarter = normalized_step(&scaled, &d, &s, 1).unwrap();
        assert!((quarter - base / 4.0).abs() < 1e-15 * base);
    }

    #[test]
    fn normalized_step_rejects_null_direction() {
        let p = problem();
        let s = IndexSet::new(vec![1], 5).unwrap();
        let err = normalized_step(&p, &[1.0, 0.0, 0.0, 0.0, 0.0], &s, 7).unwrap_err();
        assert_eq!(err, Error::DegenerateStep { iteration: 7 });
    }

    #[test]
    fn adp_iterates_satisfy_least_squares_optimality() {
        let p = problem();
        let cfg = SolverConfig::new(Algorithm::Adp, 2);
        let mut st = adp_init(&p, &cfg).unwrap();
        for _ in 0..5 {
            let corr = p.a.tr_mul_vec(&st.residual).unwrap();
            for j in st.support.iter() {
                assert!(corr[j].abs() < 1e-12);
            }
            st = adp_step(&p, &st, &cfg).unwrap();
        }
    }
}
