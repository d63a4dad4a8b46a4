//! Bulk and edge topological invariants of nearest-neighbor tight-binding
//! models: chiral 1D chains (class AIII), 2D Chern insulators (class A) and
//! 2D time-reversal-invariant insulators (class AII).
//!
//! Hamiltonians are `H(k) = V(k2) + A(k2) e^{-ik1} + A(k2)† e^{ik1}`; the
//! edge is the half-infinite strip `x >= 0` along axis 1 with Dirichlet
//! boundary, so edge states decay as `u λ^x` with `|λ| < 1`.
//!
//! Energies are dimensionless. Every tolerance in this crate is relative to
//! the scale of the model at hand with an absolute floor of `1e-14`.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bulk;
pub mod clifford;
pub mod correspondence;
pub mod edge_invariants;
pub mod edge_spectrum;
pub mod ellipse;
mod error;
pub mod exec;
pub mod models;
pub mod numerics;
pub mod random;

pub use error::{Error, ErrorKind, Result};
pub use num_complex::Complex64 as C64;
