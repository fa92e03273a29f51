use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("iterative solver did not converge within {0} sweeps")]
    NoConvergence(usize),

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("bad qubit labels: {0}")]
    BadLabels(String),

    #[error("expected a two-qubit density matrix, got {0} qubit(s)")]
    NotTwoQubit(usize),

    #[error("alpha = {alpha} outside the valid range {range}")]
    BadAlpha { alpha: f64, range: &'static str },

    #[error("bad input: {0}")]
    BadInput(String),

    #[error("too many blocks for exhaustive ordering search: {0} > 8")]
    TooManyBlocks(usize),

    #[error("needs at least {need} qubits, got {got}")]
    TooFewQubits { need: usize, got: usize },

    #[error("state is not normalized (norm^2 = {0})")]
    BadNormalization(f64),

    #[error("bad size: {0}")]
    BadSize(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian(_) | Error::NotPsd(_) | Error::NoConvergence(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
