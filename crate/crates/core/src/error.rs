use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("omega/(4g) = {x} must exceed 1 for kappa in (0,1)")]
    CouplingTooStrong { x: f64 },

    #[error("eigensolver did not converge for eigenvalue index {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },

    #[error("evaluation overflow: |zeta| = {modulus} exceeds the representable range")]
    Overflow { modulus: f64 },

    #[error("null vector residual {residual:e} above target {target:e}")]
    ResidualTooLarge { residual: f64, target: f64 },

    #[error("null space is not one-dimensional (singular values {smallest:e}, {second:e})")]
    DegenerateNullSpace { smallest: f64, second: f64 },

    #[error("no polynomial solution closes at degree cap {cap}")]
    NoClosure { cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
