use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, malformed specs or files, library errors on user input: exit 2.
    Usage(String),
    /// A verification check failed: exit 1. The output has been written.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Failed(m) => write!(f, "FAIL: {m}"),
        }
    }
}

impl From<jacobi_core::Error> for CliError {
    fn from(e: jacobi_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
