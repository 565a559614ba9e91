use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("no feasible candidate position on a lattice with spacing {spacing}")]
    EmptyCandidateSet { spacing: f64 },

    #[error("candidate {index} at ({x}, {y}) covers no event mass; total curvature is undefined")]
    DegenerateCandidate { index: usize, x: f64, y: f64 },

    #[error("instance too large: {subsets} subsets to enumerate exceeds the cap of {cap}")]
    InstanceTooLarge { subsets: u128, cap: u128 },

    #[error("{path}: {message}")]
    Scenario { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for errors caused by bad input rather than environment failures.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::InstanceTooLarge { .. })
    }
}
