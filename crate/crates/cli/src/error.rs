use std::fmt;
use std::process::ExitCode;

/// Failure of a subcommand, classified by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or arguments. Exit 1.
    Usage(String),
    /// Input that parses as a file but is wrong. Exit 2.
    Data(String),
    /// Filesystem failure. Exit 3.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Io(_) => 3,
        })
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<aisq::Error> for CliError {
    fn from(e: aisq::Error) -> Self {
        if e.is_io() {
            return CliError::Io(e.to_string());
        }
        match e {
            aisq::Error::Net(aisq::tsnet::NetError::UnknownPreset { .. }) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

macro_rules! via_core {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                aisq::Error::from(e).into()
            }
        }
    )*};
}

via_core!(
    aisq::ais::AisError,
    aisq::geo::GeoError,
    aisq::pipeline::PipelineError,
    aisq::tsnet::NetError,
    aisq::metrics::MetricsError
);

pub type CliResult<T> = Result<T, CliError>;
