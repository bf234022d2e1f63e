use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("operation requires the {expected} regime")]
    Regime { expected: &'static str },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("pole: denominator factor vanishes at index {index}")]
    Pole { index: usize },

    #[error("series did not converge after {terms} terms (last |term| = {last_term:e})")]
    NonConvergence { terms: usize, last_term: f64 },

    #[error("truncation too small: need dim >= {needed}, have {dim}")]
    Truncation { needed: usize, dim: usize },

    #[error("quadrature budget exhausted after {evals} evaluations (achieved {achieved:e}, wanted {wanted:e})")]
    Quadrature { evals: usize, achieved: f64, wanted: f64 },

    #[error("point outside the weight support: {0}")]
    Support(f64),

    #[error("weight is not normalizable: {0}")]
    Divergent(String),
}
