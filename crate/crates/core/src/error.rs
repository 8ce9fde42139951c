use thiserror::Error;

/// Failure modes of the model, path, dynamics and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested point is within tolerance of the exceptional point, where
    /// the two eigenvectors coalesce.
    #[error("exceptional point: |dE| = {magnitude:e} is within tolerance {tolerance:e}")]
    EpDegenerate { magnitude: f64, tolerance: f64 },

    #[error("time {t} is outside the path interval [0, {total}]")]
    OutOfRange { t: f64, total: f64 },

    #[error("pole of the adiabatic-frame solution at t = {t}")]
    PoleEncountered { t: f64 },

    #[error("Im(dE(0)) = 0: no loss contrast to drive a transition")]
    NoDamping,

    #[error("no transition: {0}")]
    NoTransition(String),
}

impl Error {
    /// Variant name, used as the machine-readable error tag by front ends.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::EpDegenerate { .. } => "EpDegenerate",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::PoleEncountered { .. } => "PoleEncountered",
            Error::NoDamping => "NoDamping",
            Error::NoTransition(_) => "NoTransition",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
