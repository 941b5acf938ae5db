//! Least squares restricted to a support, via Householder QR of `A_S`.

use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, DenseMatrix, DenseVector, IndexSet};

/// Relative size below which a diagonal entry of `R` marks `A_S` rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Returns the `n`-vector `z` minimising `‖b − A z‖₂` subject to `supp(z) ⊆ S`.
///
/// Entries outside `S` are exactly zero. Fails with
/// [`Error::SingularSystem`] when the columns `A_S` are (numerically)
/// linearly dependent, which includes every `|S| > m`.
pub fn least_squares_on_support(a: &DenseMatrix, b: &[f64], s: &IndexSet) -> Result<DenseVector> {
    let (m, n) = (a.rows(), a.cols());
    check_len("observation", m, b.len())?;
    check_len("support universe", n, s.universe())?;
    let k = s.len();
    let mut z = vec![0.0; n];
    if k == 0 {
        return Ok(z.into());
    }
    let singular = || Error::SingularSystem {
        support: s.as_slice().to_vec(),
    };
    if k > m {
        return Err(singular());
    }

    // Working copy of A_S, column-major m × k.
    let mut w: Vec<f64> = s.iter().flat_map(|j| a.column(j).iter().copied()).collect();
    let scale = w
        .chunks_exact(m)
        .map(|c| dot(c, c).sqrt())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(singular());
    }
    let mut rhs = b.to_vec();
    let mut diag = vec![0.0; k];
    let mut v = vec![0.0; m];

    for j in 0..k {
        let col = &w[j * m + j..(j + 1) * m];
        let norm = dot(col, col).sqrt();
        if norm <= RANK_TOLERANCE * scale {
            return Err(singular());
        }
        let alpha = if col[0] > 0.0 { -norm } else { norm };
        let len = m - j;
        v[..len].copy_from_slice(col);
        v[0] -= alpha;
        let vv = dot(&v[..len], &v[..len]);
        diag[j] = alpha;
        if vv == 0.0 {
            continue;
        }
        let reflect = |target: &mut [f64]| {
            let f = 2.0 * dot(&v[..len], target) / vv;
            for (t, vi) in target.iter_mut().zip(&v[..len]) {
                *t -= f * vi;
            }
        };
        for c in j + 1..k {
            reflect(&mut w[c * m + j..(c + 1) * m]);
        }
        reflect(&mut rhs[j..]);
    }

    // Back substitution on R (upper triangle of w, diagonal in `diag`).
    let mut coef = vec![0.0; k];
    for i in (0..k).rev() {
        let mut acc = rhs[i];
        for c in i + 1..k {
            acc -= w[c * m + i] * coef[c];
        }
        coef[i] = acc / diag[i];
    }
    for (j, c) in s.iter().zip(coef) {
        z[j] = c;
    }
    Ok(z.into())
}
