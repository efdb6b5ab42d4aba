use llcomp_core::certify::CertifyError;

/// Errors surfaced by the command-line tool. All of them map to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl From<llcomp_core::angles::AngleError> for CliError {
    fn from(e: llcomp_core::angles::AngleError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<llcomp_core::spaces::SpaceError> for CliError {
    fn from(e: llcomp_core::spaces::SpaceError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<llcomp_core::models::ModelError> for CliError {
    fn from(e: llcomp_core::models::ModelError) -> Self {
        CliError::Input(e.to_string())
    }
}
