use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("vacuum state has no conserved-coordinate representation for this operation")]
    Vacuum,

    #[error("state violates q >= rho p(rho): rho = {rho}, q = {q}")]
    InvariantViolation { rho: f64, q: f64 },

    #[error("argument {value} outside admissible range [{lo}, {hi}]")]
    Range { value: f64, lo: f64, hi: f64 },

    #[error("degenerate jump: equal densities {0}")]
    Degenerate(f64),

    #[error("flux level {target} exceeds the branch maximum {max}")]
    Infeasible { target: f64, max: f64 },

    #[error("quadrature did not converge on [{a}, {b}]")]
    Quadrature { a: f64, b: f64 },

    #[error("CFL violation: Courant number {courant} > 1")]
    Cfl { courant: f64 },

    #[error("non-finite state in cell {cell}")]
    NonFinite { cell: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
