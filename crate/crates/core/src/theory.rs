//! Convergence theory for IAD, NIAD and ADP.
//!
//! Everything here is closed-form arithmetic on the restricted isometry
//! constant `δ₃ₛ`, the step size `μ` and the memory parameter `γ`:
//!
//! * [`unroll_recurrence`] solves `b(k+2) = c₁b(k+1) + c₂a(k+1) + c₃a(k)`;
//! * [`lemma2_bound`] bounds sequences obeying
//!   `a(k+1) ≤ b₁a(k) + b₂ Σ_{i=1}^{k−1} b^{k−i}a(i) + b₃bᵏ + b₄` through the
//!   eigen-decomposition of `B = [[b₁, b], [b₂, b]]`;
//! * [`theorem1_constants`], [`c_coefficients`] and [`theorem1_error_bound`]
//!   instantiate that bound for each algorithm;
//! * [`corollary1_iterations`] turns it into an iteration count for exact
//!   support identification;
//! * [`exact_rip_constant`] computes `δ_s` of a small matrix by enumeration.

use itertools::Itertools;
use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::solvers::Algorithm;

/// `|λ − b|` at or below which the `λ = b` limit forms are used.
pub const EQUAL_ROOT_TOL: f64 = 1e-12;

/// Largest number of supports [`exact_rip_constant`] will enumerate.
pub const RIP_ENUMERATION_LIMIT: u128 = 1_000_000;

/// `b(k+1) = c₁ᵏ b(1) + c₂ a(k) + (c₁c₂ + c₃) Σ_{i=1}^{k−1} c₁^{k−1−i} a(i) + c₁^{k−1} c₃ a(0)`,
/// the solution of `b(k+2) = c₁ b(k+1) + c₂ a(k+1) + c₃ a(k)`.
///
/// `a` must hold `a(0) ..= a(k)`.
pub fn unroll_recurrence(c1: f64, c2: f64, c3: f64, a: &[f64], b1_init: f64, k: usize) -> Result<f64> {
    if k < 1 {
        return Err(Error::InvalidArgument("unroll_recurrence needs k >= 1".into()));
    }
    if a.len() < k + 1 {
        return Err(Error::InvalidArgument(format!(
            "need a(0)..a({k}), got {} values",
            a.len()
        )));
    }
    let mut sum = 0.0;
    for (i, ai) in a.iter().enumerate().take(k).skip(1) {
        sum += c1.powi((k - 1 - i) as i32) * ai;
    }
    Ok(c1.powi(k as i32) * b1_init
        + c2 * a[k]
        + (c1 * c2 + c3) * sum
        + c1.powi(k as i32 - 1) * c3 * a[0])
}

/// Eigen-structure of `B = [[b₁, b], [b₂, b]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spectrum {
    pub lambda1: f64,
    pub lambda2: f64,
    pub omega1: f64,
    pub omega2: f64,
}

impl Spectrum {
    /// Fails when `(b − b₁)² + 4bb₂ = 0`, where `ω₁, ω₂` are undefined.
    pub fn new(b: f64, b1: f64, b2: f64) -> Result<Self> {
        let root = ((b - b1).powi(2) + 4.0 * b * b2).sqrt();
        if !(root > 0.0) {
            return Err(Error::DegenerateSpectrum);
        }
        Ok(Self {
            lambda1: (b + b1 + root) / 2.0,
            lambda2: (b + b1 - root) / 2.0,
            omega1: (-b * b1 + b1 * b1 + 2.0 * b * b2) / (2.0 * root),
            omega2: (b + b1) * b2 / (2.0 * root),
        })
    }

    /// Entry `(0, 0)` of `Bʲ [b₁, b₂]ᵀ`: `(ω₁ + b₁/2)λ₁ʲ − (ω₁ − b₁/2)λ₂ʲ`.
    fn c_entry(&self, b1: f64, j: i32) -> f64 {
        (self.omega1 + b1 / 2.0) * self.lambda1.powi(j) - (self.omega1 - b1 / 2.0) * self.lambda2.powi(j)
    }

    /// Entry `(1, 0)`: `(ω₂ + b₂/2)λ₁ʲ − (ω₂ − b₂/2)λ₂ʲ`.
    fn d_entry(&self, b2: f64, j: i32) -> f64 {
        (self.omega2 + b2 / 2.0) * self.lambda1.powi(j) - (self.omega2 - b2 / 2.0) * self.lambda2.powi(j)
    }
}

/// `Σ_{i=0}^{k−3} bⁱ λ^{k−3−i}`: `(λ^{k−2} − b^{k−2})/(λ − b)`, or
/// `(k−2)λ^{k−3}` when `λ = b`.
fn theta(lambda: f64, b: f64, k: usize) -> f64 {
    if k <= 2 {
        return 0.0;
    }
    let e = (k - 2) as i32;
    if (lambda - b).abs() <= EQUAL_ROOT_TOL {
        e as f64 * lambda.powi(e - 1)
    } else {
        (lambda.powi(e) - b.powi(e)) / (lambda - b)
    }
}

/// `Σ_{j=0}^{k−3} λʲ`.
fn geometric(lambda: f64, k: usize) -> f64 {
    if k <= 2 {
        return 0.0;
    }
    let e = (k - 2) as i32;
    if (lambda - 1.0).abs() <= EQUAL_ROOT_TOL {
        e as f64
    } else {
        (1.0 - lambda.powi(e)) / (1.0 - lambda)
    }
}

/// Inputs of the recurrence bound: coefficients and the two seed values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecurrenceSpec {
    pub b: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
    pub a1: f64,
    pub a2: f64,
}

impl RecurrenceSpec {
    /// `(1 − b)(1 − b₁) > bb₂` with `0 < b < 1`: the sequence stays bounded.
    pub fn is_bounded(&self) -> bool {
        self.b > 0.0 && self.b < 1.0 && (1.0 - self.b) * (1.0 - self.b1) > self.b * self.b2
    }
}

/// Weights of the recurrence bound at a fixed `k`:
/// `a(k+1) ≤ w_a2·a(2) + w_a1·a(1) + w_b3·b₃ + w_b4·b₄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecurrenceWeights {
    pub a2: f64,
    pub a1: f64,
    pub b3: f64,
    pub b4: f64,
}

/// Weights for `a(k+1)`, `k ≥ 2`, of any sequence with
/// `a(k+1) ≤ b₁a(k) + b₂ Σ_{i=1}^{k−1} b^{k−i}a(i) + b₃bᵏ + b₄`.
///
/// The weight of `a(1)` is `b·d(2)`: after the last substitution the
/// memory sum has collapsed to its single term `b·a(1)`.
pub fn recurrence_weights(b: f64, b1: f64, b2: f64, k: usize) -> Result<RecurrenceWeights> {
    if k < 2 {
        return Err(Error::InvalidArgument("recurrence bound needs k >= 2".into()));
    }
    let sp = Spectrum::new(b, b1, b2)?;
    let j = (k - 2) as i32;
    let p1 = sp.omega1 + b1 / 2.0;
    let m1 = sp.omega1 - b1 / 2.0;
    let e = b.powi(j) + p1 * theta(sp.lambda1, b, k) - m1 * theta(sp.lambda2, b, k);
    let l = 1.0 + p1 * geometric(sp.lambda1, k) - m1 * geometric(sp.lambda2, k);
    Ok(RecurrenceWeights {
        a2: sp.c_entry(b1, j),
        a1: b * sp.d_entry(b2, j),
        b3: e * b * b,
        b4: l,
    })
}

/// Closed-form upper bound on `a(k+1)`, `k ≥ 2`.
pub fn lemma2_bound(spec: &RecurrenceSpec, k: usize) -> Result<f64> {
    for (name, v) in [
        ("b", spec.b),
        ("b1", spec.b1),
        ("b2", spec.b2),
        ("b3", spec.b3),
        ("b4", spec.b4),
        ("a1", spec.a1),
        ("a2", spec.a2),
    ] {
        if !(v >= 0.0) {
            return Err(Error::InvalidArgument(format!("{name} must be nonnegative, got {v}")));
        }
    }
    let w = recurrence_weights(spec.b, spec.b1, spec.b2, k)?;
    Ok(w.a2 * spec.a2 + w.a1 * spec.a1 + w.b3 * spec.b3 + w.b4 * spec.b4)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoryInputs {
    pub algorithm: Algorithm,
    pub delta3s: f64,
    /// Step size; read for IAD only.
    pub mu: f64,
    pub gamma: f64,
}

impl TheoryInputs {
    pub fn new(algorithm: Algorithm, delta3s: f64, mu: f64, gamma: f64) -> Result<Self> {
        let t = Self {
            algorithm,
            delta3s,
            mu,
            gamma,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.algorithm.is_alternating() {
            return Err(Error::InvalidArgument(format!(
                "theory constants exist for iad, niad and adp only, got {}",
                self.algorithm
            )));
        }
        if !(0.0..1.0).contains(&self.delta3s) {
            return Err(Error::InvalidArgument(format!(
                "delta3s must lie in [0, 1), got {}",
                self.delta3s
            )));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!("gamma must be positive, got {}", self.gamma)));
        }
        if self.algorithm == Algorithm::Iad && !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidArgument(format!("mu must be positive, got {}", self.mu)));
        }
        Ok(())
    }
}

/// Contraction constants of one algorithm.
///
/// `b₁, b₂` weight the current error and the memory sum, `b₅, b₆, b₇` the
/// start error and noise in the per-step inequality, `b₈, b₉` the start
/// error and noise in the first step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoryBounds {
    pub inputs: TheoryInputs,
    pub rho: f64,
    /// `|1 − γ|/γ`, the value `ρ` must exceed.
    pub rho_threshold: f64,
    pub b: f64,
    pub b1: f64,
    pub b2: f64,
    pub b5: f64,
    pub b6: f64,
    pub b7: f64,
    pub b8: f64,
    pub b9: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub converges: bool,
}

impl TheoryBounds {
    /// `(1 − b)(1 − b₁) > bb₂` with `0 < b < 1`.
    pub fn converges_by_recurrence(&self) -> bool {
        self.b > 0.0 && self.b < 1.0 && (1.0 - self.b) * (1.0 - self.b1) > self.b * self.b2
    }

    /// Both eigenvalues of `B` inside the unit interval `(−1, 1)`.
    pub fn converges_by_spectrum(&self) -> bool {
        self.lambda1 < 1.0 && self.lambda2 > -1.0
    }

    /// `max(λ₁, λ₂, b)`, the asymptotic contraction rate.
    pub fn rate(&self) -> f64 {
        self.lambda1.max(self.lambda2).max(self.b)
    }

    fn spectrum(&self) -> Spectrum {
        Spectrum {
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            omega1: self.omega1,
            omega2: self.omega2,
        }
    }
}

/// Evaluates `ρ`, `b₁ … b₉`, `λ₁, λ₂`, `ω₁, ω₂` for one algorithm.
///
/// `ρ` is written so that `ρ > |1−γ|/γ` is exactly `(1 − b)(1 − b₁) > bb₂`
/// for `b = 1/(1+γ)`; for NIAD this is `2(1 − (2√3+1)δ) / (√3(1+δ))`.
pub fn theorem1_constants(inputs: &TheoryInputs) -> Result<TheoryBounds> {
    inputs.validate()?;
    let d = inputs.delta3s;
    let g = inputs.gamma;
    let mu = inputs.mu;
    let s3 = 3f64.sqrt();
    let s2 = 2f64.sqrt();
    let b = 1.0 / (1.0 + g);
    let og = (1.0 - g).abs();

    let (rho, b1, b2, b5, b6, b7, b8, b9) = match inputs.algorithm {
        Algorithm::Iad => {
            let contraction = (1.0 - mu).abs() + mu * d;
            (
                2.0 * (1.0 - s3 * contraction) / (s3 * mu * (1.0 + d)),
                s3 * contraction,
                s3 * mu * og * (1.0 + d) / 2.0,
                s3 * mu * g * (1.0 + d),
                mu * (3.0 * (1.0 + d)).sqrt() / (1.0 + g),
                mu * (3.0 * (1.0 + d)).sqrt(),
                s3 * ((0.5 * mu - 1.0).abs() + 0.5 * mu * d),
                0.5 * mu * (3.0 * (1.0 + d)).sqrt(),
            )
        }
        Algorithm::Niad => (
            2.0 * (1.0 - (2.0 * s3 + 1.0) * d) / (s3 * (1.0 + d)),
            2.0 * s3 * d / (1.0 - d),
            s3 * og * (1.0 + d) / (2.0 * (1.0 - d)),
            s3 * g * (1.0 + d) / (1.0 - d),
            (3.0 * (1.0 + d)).sqrt() / ((1.0 + g) * (1.0 - d)),
            (3.0 * (1.0 + d)).sqrt() / (1.0 - d),
            s3 * (1.0 + 3.0 * d) / (2.0 * (1.0 + d)),
            (3.0 * (1.0 + d)).sqrt() / (2.0 * (1.0 - d)),
        ),
        Algorithm::Adp => (
            s2 * ((1.0 - d * d).sqrt() - s2 * d) / (1.0 + d),
            (2.0 * d * d / (1.0 - d * d)).sqrt(),
            og * ((1.0 + d) / (2.0 * (1.0 - d))).sqrt(),
            g * (2.0 * (1.0 + d) / (1.0 - d)).sqrt(),
            (2.0 / (1.0 - d)).sqrt() / (1.0 + g),
            (1.0 + d).sqrt() / (1.0 - d) + (2.0 / (1.0 - d)).sqrt(),
            (2.0 * d * d / (1.0 - d * d)).sqrt(),
            1.0 / (2.0 * (1.0 - d)).sqrt() + (1.0 + d).sqrt() / (1.0 - d),
        ),
        _ => unreachable!("validated above"),
    };
    let sp = Spectrum::new(b, b1, b2)?;
    let rho_threshold = og / g;
    Ok(TheoryBounds {
        inputs: *inputs,
        rho,
        rho_threshold,
        b,
        b1,
        b2,
        b5,
        b6,
        b7,
        b8,
        b9,
        lambda1: sp.lambda1,
        lambda2: sp.lambda2,
        omega1: sp.omega1,
        omega2: sp.omega2,
        converges: rho > rho_threshold,
    })
}

/// Coefficients `c₁ … c₇` of the error bound at iteration `k`, with the
/// `θ` factors they are assembled from.
///
/// `θᵢ₁` multiplies `λᵢ^{k−2}` and `θᵢ₂` multiplies `b^{k−2}` in the
/// expansion of `Σ_{j=0}^{k−3} bʲ λᵢ^{k−3−j}`; at `λᵢ = b` they become
/// `(k−2)/λᵢ` and `0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CCoefficients {
    pub k: usize,
    pub theta11: f64,
    pub theta12: f64,
    pub theta21: f64,
    pub theta22: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
}

fn theta_pair(lambda: f64, b: f64, k: usize) -> (f64, f64) {
    if (lambda - b).abs() <= EQUAL_ROOT_TOL {
        ((k as f64 - 2.0) / lambda, 0.0)
    } else {
        (1.0 / (lambda - b), -1.0 / (lambda - b))
    }
}

/// Assembles `c₁ … c₇` by feeding the first-step inequalities
/// `a(1) ≤ b₈a(0) + b₉‖e′‖` and `a(2) ≤ b₁a(1) + b₃b + b₄`, with
/// `b₃ = b₅a(0) − b₆‖e′‖` and `b₄ = b₇‖e′‖`, into the recurrence bound.
pub fn c_coefficients(bounds: &TheoryBounds, k: usize) -> Result<CCoefficients> {
    if k < 2 {
        return Err(Error::InvalidArgument("error bound needs k >= 2".into()));
    }
    let TheoryBounds {
        b, b1, b2, b5, b6, b7, b8, b9, lambda1, lambda2, ..
    } = *bounds;
    let sp = bounds.spectrum();
    let p1 = sp.omega1 + b1 / 2.0;
    let m1 = sp.omega1 - b1 / 2.0;
    let p2 = sp.omega2 + b2 / 2.0;
    let m2 = sp.omega2 - b2 / 2.0;
    let (theta11, theta12) = theta_pair(lambda1, b, k);
    let (theta21, theta22) = theta_pair(lambda2, b, k);
    let bb = b * b;
    let start = b1 * b8 + b * b5;
    let noise = b1 * b9 - b * b6 + b7;
    let tail = 1.0 + p1 * theta12 - m1 * theta22;
    Ok(CCoefficients {
        k,
        theta11,
        theta12,
        theta21,
        theta22,
        c1: start * p1 + b * b8 * p2 + bb * b5 * p1 * theta11,
        c2: -start * m1 - b * b8 * m2 - bb * b5 * m1 * theta21,
        c3: tail * b5,
        c4: (1.0 + p1 / (1.0 - lambda1) - m1 / (1.0 - lambda2)) * b7,
        c5: noise * p1 + b * b9 * p2 - bb * b6 * p1 * theta11 - b7 * p1 / (1.0 - lambda1),
        c6: -noise * m1 - b * b9 * m2 + bb * b6 * m1 * theta21 + b7 * m1 / (1.0 - lambda2),
        c7: -tail * b6,
    })
}

/// Upper bound on `‖x_S − x(k+1)‖₂` after `k ≥ 2` iterations:
/// `(c₁λ₁^{k−2} + c₂λ₂^{k−2} + c₃bᵏ)·x0_err + (c₄ + c₅λ₁^{k−2} + c₆λ₂^{k−2} + c₇bᵏ)·noise_norm`.
pub fn theorem1_error_bound(bounds: &TheoryBounds, k: usize, x0_err: f64, noise_norm: f64) -> Result<f64> {
    if !bounds.converges {
        return Err(Error::Precondition(format!(
            "rho = {} does not exceed |1-gamma|/gamma = {}",
            bounds.rho, bounds.rho_threshold
        )));
    }
    let c = c_coefficients(bounds, k)?;
    let j = (k - 2) as i32;
    let l1 = bounds.lambda1.powi(j);
    let l2 = bounds.lambda2.powi(j);
    let bk = bounds.b.powi(k as i32);
    Ok((c.c1 * l1 + c.c2 * l2 + c.c3 * bk) * x0_err
        + (c.c4 + c.c5 * l1 + c.c6 * l2 + c.c7 * bk) * noise_norm)
}

/// `⌈(ln(x_min/x0_err) − ln(c_sum)) / ln λ + 3⌉`, clamped at zero.
pub fn corollary_iteration_count(x_min: f64, x0_err: f64, c_sum: f64, lambda: f64) -> Result<usize> {
    if !(x_min > 0.0 && x0_err > 0.0) {
        return Err(Error::InvalidArgument("x_min and x0_err must be positive".into()));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Precondition(format!("contraction rate {lambda} is not in (0, 1)")));
    }
    if !(c_sum > 0.0) {
        return Err(Error::Precondition(format!("c1 + c2 + c3 b^2 = {c_sum} is not positive")));
    }
    let k = ((x_min / x0_err).ln() - c_sum.ln()) / lambda.ln() + 3.0;
    Ok(k.ceil().max(0.0) as usize)
}

/// Iterations after which a noiseless run is guaranteed to have found the
/// true support, given the smallest nonzero magnitude `x_min` and the start
/// error `‖x(0) − x‖₂`.
pub fn corollary1_iterations(
    x_min: f64,
    x0_err: f64,
    bounds: &TheoryBounds,
    coeffs: &CCoefficients,
) -> Result<usize> {
    if !bounds.converges {
        return Err(Error::Precondition("inputs do not satisfy the convergence condition".into()));
    }
    let c_sum = coeffs.c1 + coeffs.c2 + coeffs.c3 * bounds.b * bounds.b;
    corollary_iteration_count(x_min, x0_err, c_sum, bounds.rate())
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `δ_s = max_{|T| = s} max(λ_max(A_TᵀA_T) − 1, 1 − λ_min(A_TᵀA_T))`.
///
/// Eigenvalues of principal submatrices interlace, so supports of size
/// exactly `s` cover every smaller one.
pub fn exact_rip_constant(a: &DenseMatrix, s: usize) -> Result<f64> {
    let n = a.cols();
    if s == 0 || s > n {
        return Err(Error::InvalidArgument(format!("order must lie in 1..={n}, got {s}")));
    }
    let count = binomial(n, s);
    if count > RIP_ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            count,
            limit: RIP_ENUMERATION_LIMIT,
        });
    }
    let gram = a.gram();
    let mut delta = 0.0f64;
    for t in (0..n).combinations(s) {
        let sub = DMatrix::from_fn(s, s, |i, j| gram.get(t[i], t[j]));
        let eig = sub.symmetric_eigenvalues();
        let hi = eig.max();
        let lo = eig.min();
        delta = delta.max(hi - 1.0).max(1.0 - lo);
    }
    Ok(delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unroll_counts_steps_with_unit_coefficients() {
        let a = vec![1.0; 12];
        for k in 1..=10 {
            assert_eq!(unroll_recurrence(1.0, 1.0, 0.0, &a, 0.0, k).unwrap(), k as f64);
        }
    }

    #[test]
    fn unroll_pure_geometric() {
        let a = [3.0, -1.0, 2.0, 5.0, 4.0];
        let v = unroll_recurrence(0.5, 0.0, 0.0, &a, 2.0, 4).unwrap();
        assert_eq!(v, 2.0 * 0.5f64.powi(4));
        assert!(unroll_recurrence(0.5, 0.0, 0.0, &a, 2.0, 0).is_err());
        assert!(unroll_recurrence(0.5, 0.0, 0.0, &a, 2.0, 5).is_err());
    }

    #[test]
    fn iad_reference_point() {
        let t = TheoryInputs::new(Algorithm::Iad, 0.0, 1.0, 1.0).unwrap();
        let c = theorem1_constants(&t).unwrap();
        assert_eq!(c.b1, 0.0);
        assert_eq!(c.b2, 0.0);
        assert_eq!(c.b, 0.5);
        assert!((c.lambda1 - 0.5).abs() < 1e-15);
        assert!(c.lambda2.abs() < 1e-15);
        assert!((c.rho - 2.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(c.rho_threshold, 0.0);
        assert!(c.converges);
    }

    #[test]
    fn adp_rho_at_zero_delta() {
        let t = TheoryInputs::new(Algorithm::Adp, 0.0, 1.0, 1.0).unwrap();
        let c = theorem1_constants(&t).unwrap();
        assert!((c.rho - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn input_validation() {
        assert!(TheoryInputs::new(Algorithm::Iad, 1.0, 1.0, 1.0).is_err());
        assert!(TheoryInputs::new(Algorithm::Iad, -0.1, 1.0, 1.0).is_err());
        assert!(TheoryInputs::new(Algorithm::Htp, 0.1, 1.0, 1.0).is_err());
        assert!(TheoryInputs::new(Algorithm::Niad, 0.1, 1.0, 0.0).is_err());
        assert!(TheoryInputs::new(Algorithm::Iad, 0.1, 0.0, 1.0).is_err());
        assert!(TheoryInputs::new(Algorithm::Adp, 0.1, 0.0, 1.0).is_ok());
    }

    #[test]
    fn degenerate_spectrum_is_reported() {
        assert_eq!(Spectrum::new(0.5, 0.5, 0.0), Err(Error::DegenerateSpectrum));
        let spec = RecurrenceSpec {
            b: 0.5,
            b1: 0.5,
            b2: 0.0,
            b3: 1.0,
            b4: 0.0,
            a1: 1.0,
            a2: 1.0,
        };
        assert_eq!(lemma2_bound(&spec, 4), Err(Error::DegenerateSpectrum));
    }

    #[test]
    fn recurrence_bound_without_memory_is_a_pure_power() {
        // b₂ = b₃ = b₄ = 0 and b < b₁: a(k+1) ≤ b₁^{k−1} a(2).
        let spec = RecurrenceSpec {
            b: 0.3,
            b1: 0.6,
            b2: 0.0,
            b3: 0.0,
            b4: 0.0,
            a1: 2.0,
            a2: 1.5,
        };
        for k in 2..20 {
            let bound = lemma2_bound(&spec, k).unwrap();
            let expected = 0.6f64.powi(k as i32 - 1) * 1.5;
            assert!((bound - expected).abs() <= 1e-14 * expected, "k={k}");
        }
        let sp = Spectrum::new(0.3, 0.6, 0.0).unwrap();
        assert!((sp.lambda1 - 0.6).abs() < 1e-15 && (sp.lambda2 - 0.3).abs() < 1e-15);
    }

    #[test]
    fn recurrence_bound_needs_k_two() {
        let spec = RecurrenceSpec {
            b: 0.3,
            b1: 0.2,
            b2: 0.1,
            b3: 0.0,
            b4: 0.0,
            a1: 1.0,
            a2: 1.0,
        };
        assert!(lemma2_bound(&spec, 1).is_err());
        let neg = RecurrenceSpec { b3: -1.0, ..spec };
        assert!(lemma2_bound(&neg, 3).is_err());
    }

    #[test]
    fn theta_equal_branch_matches_limit() {
        let b = 0.4;
        for k in 2..10 {
            let exact = theta(b, b, k);
            let near = theta(b + 1e-7, b, k);
            assert!((exact - near).abs() < 1e-5, "k={k}");
        }
    }

    #[test]
    fn iteration_count_examples() {
        assert_eq!(corollary_iteration_count(1.0, 1.0, 1.0, 0.5).unwrap(), 3);
        // Halving x_min adds ln 2 / |ln λ| = 1 iteration at λ = 1/2.
        assert_eq!(corollary_iteration_count(0.5, 1.0, 1.0, 0.5).unwrap(), 4);
        assert!(corollary_iteration_count(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(corollary_iteration_count(1.0, 1.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn error_bound_requires_convergence() {
        let t = TheoryInputs::new(Algorithm::Niad, 0.5, 1.0, 1.0).unwrap();
        let c = theorem1_constants(&t).unwrap();
        assert!(!c.converges);
        assert!(matches!(theorem1_error_bound(&c, 5, 1.0, 0.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn zero_inputs_give_zero_bound() {
        let t = TheoryInputs::new(Algorithm::Adp, 0.2, 1.0, 1.0).unwrap();
        let c = theorem1_constants(&t).unwrap();
        for k in 2..30 {
            assert_eq!(theorem1_error_bound(&c, k, 0.0, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn rip_of_orthonormal_and_duplicate_columns() {
        let i4 = DenseMatrix::identity(4);
        for s in 1..=4 {
            assert!(exact_rip_constant(&i4, s).unwrap().abs() < 1e-12);
        }
        let dup = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!((exact_rip_constant(&dup, 2).unwrap() - 1.0).abs() < 1e-12);
        assert!(exact_rip_constant(&dup, 3).is_err());
    }

    #[test]
    fn rip_guard() {
        let a = DenseMatrix::from_col_major(1, 60, vec![1.0; 60]).unwrap();
        assert!(matches!(exact_rip_constant(&a, 10), Err(Error::TooLarge { .. })));
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(24, 3), 2024);
    }
}
