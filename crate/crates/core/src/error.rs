use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the requested quantity.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive integration or series summation ran out of budget.
    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },

    /// Closed-form orbital data exists only for the ground s-orbital.
    #[error("unsupported orbital n0 = {n0}: closed forms are only available for n0 = 1")]
    UnsupportedOrbital { n0: u32 },

    /// The operation is not defined for the given coupling model.
    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    /// Extrapolation to the adiabatic limit failed; carries the raw (T, P/T) sequence.
    #[error("adiabatic extrapolation failed ({reason}); sequence (T, P/T) = {sequence:?}")]
    Extrapolation { reason: String, sequence: Vec<(f64, f64)> },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn non_convergence(what: &'static str, detail: impl Into<String>) -> Self {
        Error::NonConvergence {
            what,
            detail: detail.into(),
        }
    }
}
