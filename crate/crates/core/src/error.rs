use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("budget exceeded for {what}: requires {required}, limit is {limit}")]
    Budget {
        what: String,
        required: String,
        limit: String,
    },
    #[error("tolerance unreachable: prime cutoff {cutoff} reached with width {achieved}")]
    ToleranceUnreachable { cutoff: u64, achieved: String },
    #[error("consistency fault: {0}")]
    Consistency(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
