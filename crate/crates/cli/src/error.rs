use std::fmt;

/// Failure categories, each with its own process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    /// Invalid data or a failed check (exit 1).
    Data,
    /// Bad flags or configuration (exit 2).
    Config,
    /// An endpoint or translator transport could not be used (exit 3).
    Backend,
}

impl Failure {
    pub fn exit_code(self) -> i32 {
        match self {
            Failure::Data => 1,
            Failure::Config => 2,
            Failure::Backend => 3,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub failure: Failure,
    pub error: anyhow::Error,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut text = self.error.to_string();
        for cause in self.error.chain().skip(1) {
            let cause = cause.to_string();
            if !text.contains(&cause) {
                text.push_str(": ");
                text.push_str(&cause);
            }
        }
        f.write_str(&text)
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;

/// Attaches a failure category to any error.
pub trait Categorize<T> {
    fn or_fail(self, failure: Failure) -> CliResult<T>;
}

impl<T, E: Into<anyhow::Error>> Categorize<T> for Result<T, E> {
    fn or_fail(self, failure: Failure) -> CliResult<T> {
        self.map_err(|e| CliError {
            failure,
            error: e.into(),
        })
    }
}

pub fn fail(failure: Failure, msg: impl fmt::Display) -> CliError {
    CliError {
        failure,
        error: anyhow::anyhow!("{msg}"),
    }
}
