use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Input(_) => ExitCode::from(2),
            CliError::Io { .. } => ExitCode::from(3),
            CliError::Budget(_) => ExitCode::from(4),
        }
    }
}

impl From<permris::Error> for CliError {
    fn from(e: permris::Error) -> Self {
        match e {
            permris::Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(source) => CliError::io("writing csv", source),
            other => CliError::Input(format!("csv: {other:?}")),
        }
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;
