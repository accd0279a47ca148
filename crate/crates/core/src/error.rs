use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown cluster `{0}`")]
    UnknownCluster(String),

    #[error("invalid cluster: {0}")]
    InvalidCluster(String),

    #[error("disorder assignment has {got} slots, cluster expects {expected}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("cluster sum is not finite (coupling K = {coupling})")]
    NonFinite { coupling: f64 },

    #[error("dual cluster sum is not positive ({value:e}) for cluster `{cluster}`")]
    NonPositiveDual { cluster: String, value: f64 },

    #[error("exact enumeration needs {terms} terms, budget is {budget}")]
    TooManyTerms { terms: u128, budget: u64 },

    #[error("gap has one sign on [{lo}, {hi}] (values {f_lo:e}, {f_hi:e})")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("no positive threshold exists at loss rate q = {q}")]
    NoThreshold { q: f64 },
}
