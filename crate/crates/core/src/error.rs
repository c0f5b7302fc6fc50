use crate::ais::AisError;
use crate::geo::GeoError;
use crate::metrics::MetricsError;
use crate::pipeline::PipelineError;
use crate::tsnet::NetError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Umbrella error for callers that drive several stages at once.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Ais(#[from] AisError),
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True when the root cause is a filesystem or stream failure rather than
    /// bad data.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } => true,
            Error::Ais(e) => e.is_io(),
            Error::Geo(e) => e.is_io(),
            Error::Pipeline(e) => e.is_io(),
            Error::Net(e) => e.is_io(),
            Error::Metrics(e) => e.is_io(),
        }
    }
}
