use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A factor in a denominator vanishes.
    #[error("pole: {0}")]
    Pole(String),
    /// A series kept growing until the term budget ran out.
    #[error("series did not converge within {terms} terms (last term ratio {ratio:.3e})")]
    NoConvergence { terms: usize, ratio: f64 },
    /// The tridiagonal eigenvalue iteration failed to settle.
    #[error("eigenvalue iteration did not converge for index {index} after {iterations} sweeps")]
    Convergence { index: usize, iterations: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
