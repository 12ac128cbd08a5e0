use alloc::string::String;

/// Errors raised by the estimation routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Shape parameter below the guard where the gamma-function ratios
    /// stop being meaningful.
    #[error("shape {kappa} is below the supported minimum {min} (gamma ratio out of range)")]
    ShapeOutOfRange { kappa: f64, min: f64 },

    /// The censored sample violates one of its structural invariants.
    #[error("invalid sample: {0}")]
    InvalidSample(String),

    /// The censoring scheme violates one of its invariants.
    #[error("invalid censoring scheme: {0}")]
    InvalidScheme(String),

    /// The estimator needs at least one observed failure.
    #[error("sample has no failures; the estimator requires at least one")]
    NoFailures,

    /// Product-limit estimate hit 0 or 1, which leaves the Weibull
    /// regression response undefined.
    #[error("product-limit CDF estimate is {value} at interval {index}; regression response undefined")]
    CdfDegenerate { index: usize, value: f64 },

    /// A 2x2 matrix could not be inverted.
    #[error("matrix is singular (|det| = {det:e})")]
    Singular { det: f64 },

    /// Iterative solver stopped without meeting its tolerance.
    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    /// Bootstrap resampling could not produce B successful replicates.
    #[error("bootstrap gave up after {attempts} attempts ({failures} estimator failures)")]
    BootstrapExhausted { attempts: usize, failures: usize },

    /// Proposal tuning never reached the acceptance band.
    #[error("proposal tuning failed; last pilot acceptance rate {last_rate:.3}")]
    TuningFailed { last_rate: f64 },

    /// An aggregate was requested over no values.
    #[error("empty input: {0}")]
    Empty(&'static str),
}

impl Error {
    /// Errors caused by the data itself, as opposed to numerical trouble
    /// while fitting it.
    pub fn is_data_error(&self) -> bool {
        matches!(self, Error::InvalidSample(_) | Error::InvalidScheme(_) | Error::Empty(_) | Error::NoFailures)
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
