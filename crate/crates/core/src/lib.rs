//! Certified approximations to the largest eigenvalue of 2-local qubit
//! Hamiltonians and of quadratic + quartic fermionic Hamiltonians.
//!
//! Upper bounds come from semidefinite relaxations ([`sdp`]); lower bounds
//! come from rounding the relaxation to product states ([`rounding`]) or to
//! fermionic Gaussian / Slater states ([`gaussian`]). The [`oracle`] module
//! provides exact and brute-force references for small systems.

pub mod error;
pub mod fermion;
pub mod gaussian;
pub mod instance;
pub mod linalg;
pub mod majorana;
pub mod oracle;
pub mod pauli;
pub mod qubit;
pub mod rng;
pub mod rounding;
pub mod sdp;
pub mod tol;

pub use error::{Error, Result};
