use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(&'static str),

    #[error("mode index {index} out of range for {modes} modes")]
    ModeOutOfRange { index: usize, modes: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("matrix is not symplectic (max deviation {deviation:e})")]
    NotSymplectic { deviation: f64 },

    #[error("invalid covariance matrix: {0}")]
    InvalidCovariance(&'static str),

    #[error("state is not pure (max symplectic eigenvalue deviation {deviation:e})")]
    ImpureState { deviation: f64 },

    #[error("ill-conditioned amplitude covariance (condition number {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("invalid graph: {0}")]
    InvalidGraph(&'static str),

    #[error("block determinant {det:e} is not negative")]
    WrongBranch { det: f64 },

    #[error("degenerate block: both entries of the aligned column vanish")]
    DegenerateColumn,

    #[error("degenerate phase: standardising denominator vanishes")]
    DegeneratePhase,

    #[error("invalid bipartition: {0}")]
    InvalidSubset(&'static str),
}
