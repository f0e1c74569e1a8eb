use thiserror::Error;

use crate::riccati::CaseTag;

/// Errors shared by all modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside its admissible domain. The message names
    /// the violated domain (e.g. "theta2 outside D_L^g").
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested operation is not defined for this subordinator.
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    /// The Riccati solution leaves its maximal domain before the
    /// requested horizon.
    #[error("riccati solution blows up at t_infinity = {t_infinity} before horizon {horizon}")]
    BlowUp { t_infinity: f64, horizon: f64 },

    /// Operation requires a different classification case.
    #[error("wrong case: requires {expected:?}, classification is {actual:?}")]
    WrongCase { expected: CaseTag, actual: CaseTag },

    /// A simulated spike-factor value exceeded its thinning envelope.
    #[error("envelope violation at t = {t}: Y = {y} exceeds envelope {envelope}")]
    EnvelopeViolation { t: f64, y: f64, envelope: f64 },

    /// A numerical routine failed to reach its accuracy target.
    #[error("numerical error: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
