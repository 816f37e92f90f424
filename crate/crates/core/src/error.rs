use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("oracle limit exceeded: {photons} photons (limit {limit})")]
    ResourceLimit { photons: u32, limit: u32 },

    #[error("zero-probability outcome (weight {0:e})")]
    ZeroProbability(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
