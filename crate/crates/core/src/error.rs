use thiserror::Error;

use crate::games::EquilibriumCertificate;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("malformed dimensions: {0}")]
    MalformedDimensions(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("{what} exceeds the size limit ({got} > {limit})")]
    SizeLimit {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid decision rule: {0}")]
    InvalidRule(String),

    #[error("invalid loss function: {0}")]
    InvalidLoss(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("event has probability {mass:e}, conditioning needs a positive-probability event")]
    ZeroProbabilityEvent { mass: f64 },

    #[error("constraint set describes an empty set of distributions")]
    EmptySet,

    #[error("no vertex of the credal set gives the event positive probability")]
    EmptyConditional,

    #[error("polytope is unbounded")]
    Unbounded,

    #[error("equilibrium certificate rejected: {0}")]
    CertificateFailure(Box<EquilibriumCertificate>),
}
