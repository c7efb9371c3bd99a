use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ring elements from different families (m = {left} vs m = {right})")]
    FamilyMismatch { left: u32, right: u32 },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} did not converge within {limit} iterations")]
    NotConverged { what: &'static str, limit: usize },

    #[error("{what} would hold at least {lower_bound} entries, above the limit of {limit}")]
    SizeLimit { what: &'static str, lower_bound: u128, limit: u128 },

    #[error("induced matrix is not primitive (dimension {dim})")]
    NotPrimitive { dim: usize, matrix: Vec<Vec<f64>> },

    #[error("word {0:?} has the wrong length for this system")]
    WrongLength(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
