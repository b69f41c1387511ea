use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error("matrix {0} is not positive definite")]
    NotPositiveDefinite(&'static str),

    #[error("matrix is indefinite beyond tolerance (smallest eigenvalue {min_eigenvalue:e}, allowed {allowed:e})")]
    Indefinite { min_eigenvalue: f64, allowed: f64 },

    #[error("system is not asymptotically stable (spectral abscissa {0:e})")]
    Unstable(f64),

    #[error("Sylvester operator is singular: spectra of the coefficient matrices overlap")]
    Singular,

    #[error("Schur decomposition did not converge")]
    NoConvergence,

    #[error("relative residual {residual:e} of {equation} exceeds {tolerance:e}")]
    Residual { equation: &'static str, residual: f64, tolerance: f64 },

    #[error("reduced dimension {requested} exceeds numerical rank {rank}")]
    Rank { requested: usize, rank: usize },

    #[error("shifted matrix (omega*I - A) is singular")]
    SingularShift,
}
