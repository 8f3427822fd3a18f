use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("trend check failed: {0}")]
    Trend(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Numeric(_) | Self::Io(_) => 3,
            Self::Trend(_) => 4,
        }
    }
}

impl From<scalemix_core::Error> for CliError {
    fn from(e: scalemix_core::Error) -> Self {
        match e {
            scalemix_core::Error::Unsupported(_) => Self::Config(e.to_string()),
            _ => Self::Numeric(e.to_string()),
        }
    }
}
