use std::fmt;

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Pass = 0,
    Failure = 1,
    Usage = 2,
    Size = 3,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(qdrift_core::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_status(&self) -> ExitStatus {
        use qdrift_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io(_) => ExitStatus::Usage,
            CliError::Core(E::Size { .. }) => ExitStatus::Size,
            CliError::Core(E::Domain(_) | E::Shape(_) | E::Overflow(_)) => ExitStatus::Usage,
            CliError::Core(_) => ExitStatus::Failure,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Core(e) => e.fmt(f),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qdrift_core::Error> for CliError {
    fn from(e: qdrift_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub type CliResult<T> = Result<T, CliError>;
