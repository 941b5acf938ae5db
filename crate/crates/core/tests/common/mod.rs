#![allow(dead_code)]

use adgreedy::experiments::{gen_gaussian_matrix, gen_sparse_signal, SignalKind};
use adgreedy::ProblemInstance;

/// Noiseless `m × n` Gaussian instance with an `s`-sparse Gaussian signal.
pub fn gaussian_instance(m: usize, n: usize, s: usize, seed: u64) -> ProblemInstance {
    let a = gen_gaussian_matrix(m, n, seed).unwrap();
    let (x, _) = gen_sparse_signal(n, s, SignalKind::Gaussian, seed).unwrap();
    ProblemInstance::noiseless(a, x).unwrap()
}

/// Same instance with the signal amplitudes scaled by `scale`.
pub fn scaled_instance(m: usize, n: usize, s: usize, seed: u64, scale: f64) -> ProblemInstance {
    let a = gen_gaussian_matrix(m, n, seed).unwrap();
    let (x, _) = gen_sparse_signal(n, s, SignalKind::Gaussian, seed).unwrap();
    let x: Vec<f64> = x.iter().map(|v| v * scale).collect();
    ProblemInstance::noiseless(a, x.into()).unwrap()
}
