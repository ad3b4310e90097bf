//! Certified numerics for the Kitai Criterion on `I + lambda T`.
//!
//! The crate is organized bottom-up:
//!
//! - [`numeric`]: exact rationals and certified ball arithmetic
//! - [`funcalg`]: exact polynomial / exponential-polynomial algebra on
//!   `[0, 1]`, the Volterra operator and Laguerre polynomials
//! - [`shiftspace`]: weighted shifts on truncated `l1` / `l2` vectors with
//!   certified tails, the `J` / `J*` intertwiners and diagonal similarities
//! - [`witness`]: orbit-decay certificates, growth exponents and the
//!   two-sided orbit check
//! - [`transfer`]: permutation and block-schedule combinatorics and the
//!   Hilbert-space realization of `T = T0 + T1 + T2`
//! - [`report`]: the versioned JSON report envelope

pub mod error;
pub mod funcalg;
pub mod numeric;
pub mod report;
pub mod shiftspace;
pub mod transfer;
pub mod witness;

pub use error::{Error, Result};
