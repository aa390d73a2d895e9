use std::fmt;
use std::path::PathBuf;

use cyclefit::ErrorFamily;

#[derive(Debug)]
pub enum CliError {
    Core(cyclefit::Error),
    Io { path: PathBuf, source: std::io::Error },
    /// Bad flags, settings or config file.
    Usage(String),
}

impl CliError {
    /// 1 i/o, 2 format, 3 coverage or gap, 4 parameter, 5 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Usage(_) => 4,
            CliError::Core(e) => match e.family() {
                ErrorFamily::Io => 1,
                ErrorFamily::Format => 2,
                ErrorFamily::Coverage => 3,
                ErrorFamily::Parameter => 4,
                ErrorFamily::Numerical => 5,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<cyclefit::Error> for CliError {
    fn from(e: cyclefit::Error) -> Self {
        CliError::Core(e)
    }
}
