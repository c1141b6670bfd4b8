use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("singular matrix: scaled pivot {pivot:e} in column {column} below tolerance")]
    SingularMatrix { column: usize, pivot: f64 },

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("inconsistent symbol: constant coefficient {constant} differs from 1")]
    InconsistentSymbol { constant: f64 },

    #[error("invalid polynomial degree {0}")]
    InvalidDegree(usize),

    #[error("node parameter alpha = {0} outside (0, 1/2)")]
    AlphaOutOfRange(f64),

    #[error("symmetric-alpha nodes require degree 1, got {0}")]
    KindDegreeMismatch(usize),

    #[error("invalid discretization: {0}")]
    InvalidDiscretization(String),

    #[error("diffusion coefficient does not depend on omega (|a2(1) - a2(0)| = {0:e})")]
    DegenerateDependence(f64),

    #[error("bracket [{lo}, {hi}] does not straddle the stability transition")]
    BracketInvalid { lo: f64, hi: f64 },

    #[error("symbol vanishes at theta = {theta}; no logarithm branch")]
    BranchFailure { theta: f64 },

    #[error("solution diverged at step {step} (t = {t})")]
    DivergenceDetected {
        step: usize,
        t: f64,
        /// (t, L2 norm) samples up to and including the divergent step.
        history: Vec<(f64, f64)>,
    },

    #[error("at cfl = {cfl}: {source}")]
    AtCfl { cfl: f64, source: Box<Error> },
}

impl Error {
    pub(crate) fn at_cfl(self, cfl: f64) -> Self {
        Error::AtCfl { cfl, source: Box::new(self) }
    }

    /// Innermost error, with any sweep annotation stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtCfl { source, .. } => source.root(),
            other => other,
        }
    }
}
