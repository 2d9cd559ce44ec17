use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("distance must be odd and at least 3, got {0}")]
    InvalidDistance(usize),

    #[error("round count must be at least 1")]
    InvalidRounds,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Document {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("web does not belong to this diagram: {0}")]
    ForeignWeb(String),

    #[error("invalid boundary condition: {0}")]
    BoundaryCondition(String),

    #[error("invalid error insertion: {0}")]
    ErrorInsertion(String),

    #[error("diagram was not produced by the surface builder: {0}")]
    UnrecognizedStructure(String),

    #[error("unknown check id {0:?}")]
    UnknownCheck(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
