use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] h4_core::Error),
    #[error("cache: {0}")]
    Cache(#[from] std::io::Error),
    #[error("output: {0}")]
    Json(#[from] serde_json::Error),
}
