//! Thresholding operators, supports, residuals and gradients.

use std::cmp::Ordering;

use crate::error::{check_len, Error, Result};
use crate::linalg::{DenseMatrix, DenseVector, IndexSet};

/// `hard(x, τ)`: keeps the entries with `|x_i| > τ`, zeroes the rest.
/// Entries sitting exactly on the threshold are dropped.
pub fn hard_threshold_by_value(x: &[f64], tau: f64) -> Result<DenseVector> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must be nonnegative, got {tau}"
        )));
    }
    Ok(x.iter()
        .map(|&v| if v.abs() > tau { v } else { 0.0 })
        .collect::<Vec<_>>()
        .into())
}

/// Order: larger magnitude first, lower index first among ties.
fn magnitude_order(x: &[f64]) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&i, &j| x[j].abs().total_cmp(&x[i].abs()).then(i.cmp(&j))
}

/// Indices of the `s` entries `H_s` keeps, in increasing order. Zero entries
/// are never selected, so fewer than `s` indices come back when `‖x‖₀ < s`.
pub fn top_s_indices(x: &[f64], s: usize) -> Result<Vec<usize>> {
    if s > x.len() {
        return Err(Error::InvalidArgument(format!(
            "sparsity {s} exceeds vector length {}",
            x.len()
        )));
    }
    if s == 0 {
        return Ok(Vec::new());
    }
    let mut idx: Vec<usize> = (0..x.len()).collect();
    if s < idx.len() {
        idx.select_nth_unstable_by(s - 1, magnitude_order(x));
        idx.truncate(s);
    }
    idx.retain(|&i| x[i] != 0.0);
    idx.sort_unstable();
    Ok(idx)
}

/// `H_s(x)`: keeps the `s` largest-magnitude entries, lowest index winning ties.
pub fn hard_threshold_top_s(x: &[f64], s: usize) -> Result<DenseVector> {
    let keep = top_s_indices(x, s)?;
    let mut out = vec![0.0; x.len()];
    for i in keep {
        out[i] = x[i];
    }
    Ok(out.into())
}

/// Gap between the `s`-th and `(s+1)`-th largest magnitudes of `x`.
///
/// `H_s` changes its selection under perturbations smaller than this gap
/// only; returns `+∞` when no boundary exists (`s = 0` or `s ≥ len`).
pub fn top_s_gap(x: &[f64], s: usize) -> f64 {
    if s == 0 || s >= x.len() {
        return f64::INFINITY;
    }
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    mags[s - 1] - mags[s]
}

/// Indices of the nonzero entries of `x`.
pub fn support(x: &[f64]) -> IndexSet {
    let idx = x
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, _)| i)
        .collect();
    IndexSet::from_sorted_unchecked(idx, x.len())
}

/// `b − A x`.
pub fn residual(a: &DenseMatrix, x: &[f64], b: &[f64]) -> Result<DenseVector> {
    check_len("observation", a.rows(), b.len())?;
    let ax = a.mul_vec(x)?;
    Ok(b.iter().zip(ax).map(|(bi, axi)| bi - axi).collect::<Vec<_>>().into())
}

/// `∇f(x) = Aᵀ(A x − b)` for `f(x) = ½‖A x − b‖²`.
pub fn gradient(a: &DenseMatrix, x: &[f64], b: &[f64]) -> Result<DenseVector> {
    let r = residual(a, x, b)?;
    let mut g = a.tr_mul_vec(&r)?;
    g.iter_mut().for_each(|v| *v = -*v);
    Ok(g.into())
}

/// `x_S`: `x` with every entry outside `s` set to zero.
pub fn restrict(x: &[f64], s: &IndexSet) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for i in s.iter() {
        out[i] = x[i];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hard_by_value_examples() {
        assert_eq!(
            hard_threshold_by_value(&[-3.0, 0.5, 2.0], 1.0).unwrap().as_slice(),
            &[-3.0, 0.0, 2.0]
        );
        assert_eq!(
            hard_threshold_by_value(&[1.0, -1.0, 0.0], 0.0).unwrap().as_slice(),
            &[1.0, -1.0, 0.0]
        );
        assert_eq!(
            hard_threshold_by_value(&[2.0, -2.0], 2.0).unwrap().as_slice(),
            &[0.0, 0.0]
        );
        assert!(hard_threshold_by_value(&[1.0], -0.1).is_err());
        assert!(hard_threshold_by_value(&[1.0], f64::NAN).is_err());
    }

    #[test]
    fn top_s_examples() {
        assert_eq!(
            hard_threshold_top_s(&[5.0, -1.0, 3.0, 0.0], 2).unwrap().as_slice(),
            &[5.0, 0.0, 3.0, 0.0]
        );
        assert_eq!(
            hard_threshold_top_s(&[1.0, -1.0, 2.0], 2).unwrap().as_slice(),
            &[1.0, 0.0, 2.0]
        );
        assert_eq!(
            hard_threshold_top_s(&[4.0, -2.0, 7.0], 0).unwrap().as_slice(),
            &[0.0; 3]
        );
        assert!(hard_threshold_top_s(&[1.0], 2).is_err());
    }

    #[test]
    fn top_s_keeps_only_nonzeros() {
        let y = hard_threshold_top_s(&[0.0, 2.0, 0.0, 0.0], 3).unwrap();
        assert_eq!(support(&y).as_slice(), &[1]);
    }

    #[test]
    fn top_s_gap_values() {
        assert_eq!(top_s_gap(&[3.0, -1.0, 2.0], 1), 1.0);
        assert_eq!(top_s_gap(&[3.0, -1.0, 2.0], 3), f64::INFINITY);
        assert_eq!(top_s_gap(&[1.0, -1.0], 1), 0.0);
    }

    #[test]
    fn support_examples() {
        assert_eq!(support(&[0.0, 3.0, 0.0, -1.0]).as_slice(), &[1, 3]);
        assert!(support(&[0.0; 4]).is_empty());
    }

    #[test]
    fn residual_examples() {
        let i2 = DenseMatrix::identity(2);
        assert_eq!(residual(&i2, &[1., 2.], &[1., 2.]).unwrap().as_slice(), &[0., 0.]);
        assert_eq!(residual(&i2, &[0., 0.], &[3., 4.]).unwrap().as_slice(), &[3., 4.]);
        let row = DenseMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        assert_eq!(residual(&row, &[1., 1.], &[5.]).unwrap().as_slice(), &[3.]);
        assert!(residual(&i2, &[1.0], &[1., 2.]).is_err());
        assert!(residual(&i2, &[1.0, 1.0], &[1.]).is_err());
    }

    #[test]
    fn gradient_examples() {
        let i2 = DenseMatrix::identity(2);
        assert_eq!(gradient(&i2, &[1., 2.], &[1., 2.]).unwrap().as_slice(), &[0., 0.]);
        assert_eq!(gradient(&i2, &[0., 0.], &[3., 4.]).unwrap().as_slice(), &[-3., -4.]);
        assert!(gradient(&i2, &[0.0; 3], &[3., 4.]).is_err());
    }
}
