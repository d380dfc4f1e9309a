use thiserror::Error;

/// Crate-wide error type.
///
/// The variants follow the failure taxonomy used throughout the crate:
/// `Domain` for inputs outside an operation's domain, `Precondition` for
/// violated caller contracts (the message names the offending element),
/// `ResourceLimit` for honest refusals when an exact computation would
/// exceed configured caps, and `Stage` for pipeline errors that must name
/// the stage they came from.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("stage '{stage}' failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Wraps an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
