use thiserror::Error;

use crate::arith::ArithError;
use crate::element::Key;
use crate::group::{TypeIdx, ValidationReport};

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(ValidationReport),
    #[error("unknown basis index ({}, {})", .0.ty, .0.idx)]
    UnknownKey(Key),
    #[error("unknown type #{0}")]
    UnknownType(TypeIdx),
    #[error("element is not in G")]
    NotMember,
    #[error("invalid structure constants: {0}")]
    InvalidConstants(String),
    #[error("invalid endomorphism: {0}")]
    InvalidEndomorphism(String),
    #[error("constructor precondition failed: {0}")]
    Precondition(String),
    #[error("at most {max} generators are supported, got {got}")]
    TooManyGenerators { max: usize, got: usize },
    #[error("{path}: {message}")]
    Json { path: String, message: String },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

impl Error {
    pub fn json(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Json { path: path.into(), message: message.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
