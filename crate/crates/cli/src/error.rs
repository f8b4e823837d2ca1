use credal_core::games::EquilibriumCertificate;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error("{0}")]
    SizeLimit(String),

    #[error("equilibrium certificate rejected: {0}")]
    Certificate(Box<EquilibriumCertificate>),

    #[error("{0}")]
    Io(String),

    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Certificate(_) => 3,
            CliError::SizeLimit(_) => 4,
            CliError::Io(_) | CliError::Internal(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Certificate(_) => "certificate_failure",
            CliError::SizeLimit(_) => "size_limit",
            CliError::Io(_) => "io",
            CliError::Internal(_) => "internal",
        }
    }
}

impl From<credal_core::Error> for CliError {
    fn from(e: credal_core::Error) -> Self {
        use credal_core::Error as E;
        match e {
            E::SizeLimit { .. } => CliError::SizeLimit(e.to_string()),
            E::CertificateFailure(cert) => CliError::Certificate(cert),
            E::NumericalFailure(_) | E::Unbounded => CliError::Internal(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
