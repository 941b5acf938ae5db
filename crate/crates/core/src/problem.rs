use crate::error::{check_len, Error, Result};
use crate::linalg::{DenseMatrix, DenseVector, IndexSet};
use crate::sparse::support;

/// A compressed-sensing instance `b = A x_S + e′`.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub a: DenseMatrix,
    pub b: DenseVector,
    pub truth: Option<DenseVector>,
    pub true_support: Option<IndexSet>,
    pub noise: Option<DenseVector>,
}

impl ProblemInstance {
    /// An instance with only `A` and `b` known.
    pub fn new(a: DenseMatrix, b: DenseVector) -> Result<Self> {
        check_len("observation", a.rows(), b.len())?;
        Ok(Self {
            a,
            b,
            truth: None,
            true_support: None,
            noise: None,
        })
    }

    /// A noiseless instance `b = A x` with the ground truth attached.
    pub fn noiseless(a: DenseMatrix, truth: DenseVector) -> Result<Self> {
        let b: DenseVector = a.mul_vec(&truth)?.into();
        let true_support = support(&truth);
        Ok(Self {
            a,
            b,
            truth: Some(truth),
            true_support: Some(true_support),
            noise: None,
        })
    }

    /// `b = A x + e`.
    pub fn with_noise(a: DenseMatrix, truth: DenseVector, noise: DenseVector) -> Result<Self> {
        check_len("noise", a.rows(), noise.len())?;
        let mut b = a.mul_vec(&truth)?;
        for (bi, ei) in b.iter_mut().zip(noise.iter()) {
            *bi += ei;
        }
        let true_support = support(&truth);
        Ok(Self {
            a,
            b: b.into(),
            truth: Some(truth),
            true_support: Some(true_support),
            noise: Some(noise),
        })
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// Checks dimensions and the truth/support consistency invariant.
    pub fn validate(&self) -> Result<()> {
        check_len("observation", self.m(), self.b.len())?;
        if let Some(t) = &self.truth {
            check_len("truth", self.n(), t.len())?;
        }
        if let Some(e) = &self.noise {
            check_len("noise", self.m(), e.len())?;
        }
        if let Some(s) = &self.true_support {
            check_len("support universe", self.n(), s.universe())?;
            if let Some(t) = &self.truth {
                if &support(t) != s {
                    return Err(Error::InvalidArgument(
                        "true_support differs from the support of truth".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}
