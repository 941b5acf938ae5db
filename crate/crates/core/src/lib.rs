//! Alternating-direction greedy solvers for compressed sensing.
//!
//! The crate provides:
//!
//! * dense primitives and the sparse-recovery building blocks
//!   ([`sparse`], [`lstsq`], [`linalg`]);
//! * the raw ADMM iteration for ℓ0-regularised least squares and its
//!   recursion-free reformulation ([`admm`]);
//! * IAD, NIAD and ADP together with the IHT, NIHT and HTP baselines
//!   ([`solvers`]);
//! * the RIP-based convergence constants and error bounds ([`theory`]);
//! * a seeded Monte-Carlo harness for exact-recovery curves ([`experiments`]).

pub mod admm;
pub mod experiments;
pub mod error;
pub mod linalg;
pub mod lstsq;
pub mod problem;
pub mod solvers;
pub mod sparse;
pub mod theory;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, DenseVector, IndexSet};
pub use problem::ProblemInstance;
pub use solvers::{run_solver, Algorithm, SolverConfig, SolverResult, StopReason};
