use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated its type invariant.
    #[error("{name} must be {requirement}, got {value}")]
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// Posterior after a click when the detector can never click.
    #[error("posterior given a detector click is undefined: the detector can never fire (eta = {eta}, mean = {mean})")]
    UndefinedPosterior { eta: f64, mean: f64 },

    #[error("probability conditioned on a trigger is undefined: the trigger can never fire (eta = {eta}, nbar = {nbar})")]
    UndefinedConditioning { eta: f64, nbar: f64 },

    #[error("delay index {index} out of range 1..={num_delays}")]
    DelayOutOfRange { index: u32, num_delays: u32 },

    #[error("objective is not unimodal on the search grid")]
    NotUnimodal,

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, requirement: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            requirement,
        }
    }

    /// True for failures of the output sink rather than of the inputs.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::Csv(e) => e.is_io_error(),
            Error::Json(e) => e.is_io(),
            _ => false,
        }
    }

    /// The reader closed the pipe, as `head` does.
    pub fn is_broken_pipe(&self) -> bool {
        let kind = match self {
            Error::Io(e) => Some(e.kind()),
            Error::Csv(e) => match e.kind() {
                csv::ErrorKind::Io(e) => Some(e.kind()),
                _ => None,
            },
            Error::Json(e) => e.io_error_kind(),
            _ => None,
        };
        kind == Some(std::io::ErrorKind::BrokenPipe)
    }
}
