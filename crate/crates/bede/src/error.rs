//! Library error type. Every failure names the operation that produced it so
//! CLI diagnostics can point at the failing computation.

/// Errors produced by the estimation library.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// An argument was outside the operation's domain.
    #[error("{op}: domain error: {detail}")]
    Domain { op: &'static str, detail: String },

    /// Adaptive quadrature hit the subdivision depth cap. Carries the best
    /// available estimate and its error bound.
    #[error("{op}: quadrature did not converge (best estimate {best:e}, error bound {error_bound:e})")]
    Quadrature {
        op: &'static str,
        best: f64,
        error_bound: f64,
    },

    /// A discrete sum showed no decaying tail within the term cap.
    #[error("{op}: discrete sum did not decay within {cap} terms")]
    SumDivergent { op: &'static str, cap: usize },

    /// An iterative method exhausted its iteration budget. Carries the best
    /// point found.
    #[error("{op}: did not converge within the iteration cap (best point {best:?}, value {value:e})")]
    NotConverged {
        op: &'static str,
        best: Vec<f64>,
        value: f64,
    },

    /// A matrix required to be invertible (or positive definite) was not.
    /// `name` identifies which matrix (for example "J" or "K").
    #[error("{op}: singular or non-positive-definite matrix {name}")]
    Singular { op: &'static str, name: String },

    /// Root search found no zero of the estimating function.
    #[error("{op}: no root found from any start; widen the start grid or relax the pair")]
    NoRoot { op: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }
}
