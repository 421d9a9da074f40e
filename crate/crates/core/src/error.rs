use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot parse number {input:?}: {reason}")]
    ParseNumber { input: String, reason: String },

    #[error("input document: {0}")]
    Document(String),

    /// Raised by the linear solver. For β < 1 the systems are nonsingular,
    /// so this always signals a backend bug.
    #[error("internal error: singular linear system ({0})")]
    Singular(&'static str),

    #[error("operation requires m = {expected}, got m = {actual}")]
    WrongOutDegree { expected: usize, actual: usize },

    #[error("best-response set would have {0} members (cap is 1000000)")]
    TooManyBestResponses(u128),

    #[error("configuration space has {0} profiles, above the enumeration guard of 100000000")]
    SpaceTooLarge(u128),

    #[error("precondition violated: configuration is not a Nash equilibrium")]
    NotNash,
}
