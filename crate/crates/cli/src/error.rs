use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Module {
        context: String,
        #[source]
        source: orbitforge::Error,
    },
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Module { source, .. } if is_input_error(source) => 2,
            _ => 1,
        }
    }
}

fn is_input_error(e: &orbitforge::Error) -> bool {
    use orbitforge::Error::*;
    matches!(e, Parse(_) | Invalid(_) | DimensionMismatch(_) | NotOnComponent(_))
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub trait Context<T> {
    fn context(self, what: &str) -> CliResult<T>;
}

impl<T> Context<T> for orbitforge::Result<T> {
    fn context(self, what: &str) -> CliResult<T> {
        self.map_err(|source| CliError::Module { context: what.into(), source })
    }
}
