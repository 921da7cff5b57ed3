//! Exact Riemann solvers, entropy pairs and a Lax-Friedrichs simulator for
//! the 2x2 Temple system
//!
//! ```text
//! d_t U + d_x (c(x) F(U)) = 0,   U = (rho, q),   F(U) = V(h(U)) U,
//! h(U) = q / rho - p(rho),
//! ```
//!
//! with a discontinuous coefficient `c(x)`. The Riemann solvers work in the
//! invariant coordinates `(h, w)` where `w = q / rho`, in which the flux is
//! well defined at the vacuum.

pub mod cli;
pub mod config;
pub mod entropy;
pub mod error;
pub mod format;
pub mod fvm;
pub mod model;
pub mod quad;
pub mod riemann;
pub mod roots;
pub mod state;

pub use error::{Error, Result};
pub use model::{CoefficientProfile, ModelLaws};
pub use state::{ConservedState, InvariantState};
