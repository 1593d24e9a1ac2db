//! Eigenvalue enclosures for half-line Schrödinger operators
//! `H = -d²/dx² + q(x)` with complex potentials, together with an
//! independent eigensolver used to check them.

pub mod eigensolver;
pub mod enclosure;
pub mod error;
pub mod harness;
pub mod potential;
pub(crate) mod quad;
pub mod resolvent;
pub mod specfun;

pub use error::{Error, Result};
