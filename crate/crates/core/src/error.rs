use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value for {0}")]
    NonFinite(&'static str),

    /// The actuation delay is not an integer number of sample periods.
    #[error("delay {phi} s is not an integer multiple of the sample period {ts} s")]
    DelayGranularity { phi: f64, ts: f64 },

    #[error("input history holds {found} samples, expected {expected}")]
    Buffer { expected: usize, found: usize },

    /// A predecessor signal required by the active controller is missing.
    #[error("missing channel: {0}")]
    Channel(&'static str),

    #[error("unsupported relative degree {0}")]
    Degree(u32),

    #[error("no characteristic root found in the search rectangle")]
    NoRoot,

    #[error("argument principle counts {winding} roots but the search found {found}")]
    Refinement { winding: i64, found: usize },

    #[error("misaligned logs: {0}")]
    MisalignedLogs(String),

    #[error("operation not defined for the {0} policy")]
    UnsupportedPolicy(&'static str),

    #[error("at sample {index}: {source}")]
    AtSample { index: usize, source: Box<Error> },
}

impl Error {
    /// Tags the error with the simulation sample where it occurred.
    pub fn at_sample(self, index: usize) -> Self {
        Error::AtSample {
            index,
            source: Box::new(self),
        }
    }
}
