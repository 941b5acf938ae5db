//! Greedy sparse solvers behind one interface.
//!
//! Alternating-direction variants (IAD, NIAD, ADP) carry two memory vectors
//! `u` and `v` that fold every past residual back into the update. The
//! classical baselines (IHT, NIHT, HTP) are the same iterations with the
//! memory held at zero.

mod alternating;
mod baseline;
mod explicit;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm2, DenseVector, IndexSet};
use crate::problem::ProblemInstance;
use crate::sparse::{hard_threshold_top_s, residual, support};

pub use alternating::{adp_init, adp_step, iad_init, iad_step, niad_init, niad_step};
pub use baseline::{htp_init, htp_step, iht_init, iht_step, niht_init, niht_step};
pub use explicit::{check_explicit_iad, iad_explicit_update, ExplicitReport};

pub const DEFAULT_MAX_ITERS: usize = 400;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-6;
pub const DEFAULT_MU: f64 = 1.0;
pub const DEFAULT_GAMMA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Iht,
    Niht,
    Htp,
    Iad,
    Niad,
    Adp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Iht,
        Algorithm::Niht,
        Algorithm::Htp,
        Algorithm::Iad,
        Algorithm::Niad,
        Algorithm::Adp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Iht => "iht",
            Algorithm::Niht => "niht",
            Algorithm::Htp => "htp",
            Algorithm::Iad => "iad",
            Algorithm::Niad => "niad",
            Algorithm::Adp => "adp",
        }
    }

    /// Whether the fixed step size `μ` is read.
    pub fn uses_mu(self) -> bool {
        matches!(self, Algorithm::Iht | Algorithm::Iad)
    }

    /// Whether the `u`/`v` memory (and hence `γ`) is used.
    pub fn is_alternating(self) -> bool {
        matches!(self, Algorithm::Iad | Algorithm::Niad | Algorithm::Adp)
    }

    /// The memoryless counterpart: IAD→IHT, NIAD→NIHT, ADP→HTP.
    pub fn baseline(self) -> Algorithm {
        match self {
            Algorithm::Iad => Algorithm::Iht,
            Algorithm::Niad => Algorithm::Niht,
            Algorithm::Adp => Algorithm::Htp,
            other => other,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    /// Target sparsity.
    pub s: usize,
    /// Fixed step size; read by IHT and IAD only.
    pub mu: f64,
    /// Memory decay parameter; read by IAD, NIAD and ADP only.
    pub gamma: f64,
    pub max_iters: usize,
    /// Stop once `‖b − A x‖₂ / ‖b‖₂` falls to or below this.
    pub residual_tol: f64,
    /// Starting point; the zero vector when absent.
    pub x0: Option<DenseVector>,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm, s: usize) -> Self {
        Self {
            algorithm,
            s,
            mu: DEFAULT_MU,
            gamma: DEFAULT_GAMMA,
            max_iters: DEFAULT_MAX_ITERS,
            residual_tol: DEFAULT_RESIDUAL_TOL,
            x0: None,
        }
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_residual_tol(mut self, tol: f64) -> Self {
        self.residual_tol = tol;
        self
    }

    pub fn with_x0(mut self, x0: DenseVector) -> Self {
        self.x0 = Some(x0);
        self
    }

    /// Checks the configuration against a problem with `n` unknowns.
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.s == 0 || self.s > n {
            return bad(format!("sparsity must lie in 1..={n}, got {}", self.s));
        }
        if self.algorithm.uses_mu() && !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad(format!("mu must be positive, got {}", self.mu));
        }
        if self.algorithm.is_alternating() && !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be positive, got {}", self.gamma));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1".into());
        }
        if !(self.residual_tol >= 0.0) {
            return bad(format!(
                "residual tolerance must be nonnegative, got {}",
                self.residual_tol
            ));
        }
        if let Some(x0) = &self.x0 {
            if x0.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "x0",
                    expected: n,
                    got: x0.len(),
                });
            }
            if !x0.is_finite() {
                return bad("x0 must be finite".into());
            }
        }
        Ok(())
    }

    fn start(&self, n: usize) -> DenseVector {
        self.x0.clone().unwrap_or_else(|| DenseVector::zeros(n))
    }
}

/// Iterate `x(k)` together with the memory and bookkeeping the next step needs.
#[derive(Debug, Clone, PartialEq)]
pub struct IterState {
    pub x: DenseVector,
    pub u: DenseVector,
    pub v: DenseVector,
    /// `S(k) = supp(x(k))`.
    pub support: IndexSet,
    /// Step size of the last normalized update (NIAD/NIHT); the fixed `μ` otherwise.
    pub mu: f64,
    pub k: usize,
    /// `c(k) = b − A x(k)`.
    pub residual: DenseVector,
}

impl IterState {
    /// `x(0)` with empty memory, `k = 0`.
    pub fn start(problem: &ProblemInstance, x0: DenseVector, mu: f64) -> Result<Self> {
        let n = problem.n();
        let residual = residual(&problem.a, &x0, &problem.b)?;
        Ok(Self {
            support: support(&x0),
            x: x0,
            u: DenseVector::zeros(n),
            v: DenseVector::zeros(n),
            mu,
            k: 0,
            residual,
        })
    }

    pub(crate) fn next(
        problem: &ProblemInstance,
        x: DenseVector,
        u: DenseVector,
        v: DenseVector,
        mu: f64,
        k: usize,
    ) -> Result<Self> {
        let residual = residual(&problem.a, &x, &problem.b)?;
        Ok(Self {
            support: support(&x),
            x,
            u,
            v,
            mu,
            k,
            residual,
        })
    }
}

/// `Aᵀc = −∇f(x)` for the stored residual `c = b − A x`.
pub(crate) fn neg_gradient(problem: &ProblemInstance, state: &IterState) -> Result<Vec<f64>> {
    problem.a.tr_mul_vec(&state.residual)
}

/// Computes `x(1)` (and the matching memory) from the configured start point.
pub fn init(problem: &ProblemInstance, config: &SolverConfig) -> Result<IterState> {
    match config.algorithm {
        Algorithm::Iht => iht_init(problem, config),
        Algorithm::Niht => niht_init(problem, config),
        Algorithm::Htp => htp_init(problem, config),
        Algorithm::Iad => iad_init(problem, config),
        Algorithm::Niad => niad_init(problem, config),
        Algorithm::Adp => adp_init(problem, config),
    }
}

/// Advances `x(k) → x(k+1)` with the configured algorithm.
pub fn step(problem: &ProblemInstance, state: &IterState, config: &SolverConfig) -> Result<IterState> {
    match config.algorithm {
        Algorithm::Iht => iht_step(problem, state, config),
        Algorithm::Niht => niht_step(problem, state, config),
        Algorithm::Htp => htp_step(problem, state, config),
        Algorithm::Iad => iad_step(problem, state, config),
        Algorithm::Niad => niad_step(problem, state, config),
        Algorithm::Adp => adp_step(problem, state, config),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ResidualTol,
    MaxIters,
    /// NIAD/NIHT hit `‖A d_S‖ = 0`.
    DegenerateStep,
    /// HTP/ADP met a rank-deficient `A_S`.
    SingularSystem,
    /// An iterate stopped being finite.
    Diverged,
}

impl StopReason {
    pub fn is_failure(self) -> bool {
        matches!(
            self,
            StopReason::DegenerateStep | StopReason::SingularSystem | StopReason::Diverged
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverResult {
    pub x_final: DenseVector,
    pub support_final: IndexSet,
    pub iterations_used: usize,
    pub stop_reason: StopReason,
    /// `‖b − A x(k)‖₂ / ‖b‖₂` for `k = 0 ..= iterations_used`.
    pub relative_residual_history: Vec<f64>,
    /// `‖x_S − x(k)‖₂` when the ground truth is known.
    pub error_history: Option<Vec<f64>>,
    /// Message of the step error that ended the run, if any.
    pub error: Option<String>,
}

/// Iterates the configured algorithm until the relative residual reaches
/// `residual_tol` or `max_iters` iterations have run.
///
/// Step failures (degenerate normalized step, singular least squares,
/// divergence) end the run and are reported through `stop_reason`; only
/// invalid configurations return `Err`.
pub fn run_solver(problem: &ProblemInstance, config: &SolverConfig) -> Result<SolverResult> {
    problem.validate()?;
    let n = problem.n();
    config.validate(n)?;

    let target = problem
        .truth
        .as_ref()
        .map(|t| hard_threshold_top_s(t, config.s.min(n)))
        .transpose()?;
    let err_of = |x: &[f64]| {
        target.as_ref().map(|t| {
            norm2(&t.iter().zip(x).map(|(a, b)| a - b).collect::<Vec<_>>())
        })
    };

    let b_norm = problem.b.norm2();
    if b_norm == 0.0 {
        let x = DenseVector::zeros(n);
        return Ok(SolverResult {
            error_history: err_of(&x).map(|e| vec![e]),
            support_final: IndexSet::empty(n),
            x_final: x,
            iterations_used: 0,
            stop_reason: StopReason::ResidualTol,
            relative_residual_history: vec![0.0],
            error: None,
        });
    }

    let mut res_hist = Vec::new();
    let mut err_hist = target.as_ref().map(|_| Vec::new());
    let record = |state: &IterState, res_hist: &mut Vec<f64>, err_hist: &mut Option<Vec<f64>>| {
        let rel = state.residual.norm2() / b_norm;
        res_hist.push(rel);
        if let (Some(h), Some(e)) = (err_hist.as_mut(), err_of(&state.x)) {
            h.push(e);
        }
        rel
    };

    let mut state = IterState::start(problem, config.start(n), config.mu)?;
    let mut rel = record(&state, &mut res_hist, &mut err_hist);
    let mut failure: Option<Error> = None;
    let mut diverged = false;
    while rel > config.residual_tol && state.k < config.max_iters {
        let next = if state.k == 0 {
            init(problem, config)
        } else {
            step(problem, &state, config)
        };
        match next {
            Ok(s) => {
                if !s.x.is_finite() || !s.residual.is_finite() {
                    diverged = true;
                    break;
                }
                state = s;
                rel = record(&state, &mut res_hist, &mut err_hist);
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }

    let stop_reason = match (&failure, diverged) {
        (Some(Error::DegenerateStep { .. }), _) => StopReason::DegenerateStep,
        (Some(Error::SingularSystem { .. }), _) => StopReason::SingularSystem,
        (Some(e), _) => return Err(e.clone()),
        (None, true) => StopReason::Diverged,
        (None, false) => {
            if rel <= config.residual_tol {
                StopReason::ResidualTol
            } else {
                StopReason::MaxIters
            }
        }
    };
    Ok(SolverResult {
        support_final: state.support.clone(),
        iterations_used: state.k,
        x_final: state.x,
        stop_reason,
        relative_residual_history: res_hist,
        error_history: err_hist,
        error: failure.map(|e| e.to_string()),
    })
}
