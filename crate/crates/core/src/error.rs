use thiserror::Error;

/// Errors produced by the engine.
///
/// `Validation` covers malformed or inconsistent inputs (bad permutations,
/// mismatched groups, illegal moves); `Resource` covers configured caps
/// (group order bound, subgroup count cap, search degree cap).
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("validation: {0}")]
    Validation(String),
    #[error("resource limit: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}

pub(crate) fn resource<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Resource(msg.into()))
}
