use std::fmt;
use std::path::Path;

use centrality_game::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;
pub const EXIT_NEGATIVE: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }

    pub fn read(path: &Path, err: std::io::Error) -> Self {
        Self::usage(format!("cannot read {}: {err}", path.display()))
    }

    pub fn write(path: &Path, err: std::io::Error) -> Self {
        Self::internal(format!("cannot write {}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::InvalidParams(_)
            | Error::InvalidConfig(_)
            | Error::ParseNumber { .. }
            | Error::Document(_)
            | Error::WrongOutDegree { .. }
            | Error::SpaceTooLarge(_) => EXIT_USAGE,
            Error::NotNash => EXIT_NEGATIVE,
            Error::Singular(_) | Error::TooManyBestResponses(_) => EXIT_INTERNAL,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
