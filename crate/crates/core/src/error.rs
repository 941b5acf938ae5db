use thiserror::Error;

/// Errors raised by the solvers, the ADMM oracle and the theory calculators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("singular least-squares system on support {support:?}")]
    SingularSystem { support: Vec<usize> },

    #[error("degenerate step at iteration {iteration}: ||A d_S|| = 0")]
    DegenerateStep { iteration: usize },

    #[error("degenerate spectrum: (b - b1)^2 + 4 b b2 = 0")]
    DegenerateSpectrum,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{count} supports to enumerate exceeds the limit of {limit}")]
    TooLarge { count: u128, limit: u128 },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            got,
        })
    }
}
