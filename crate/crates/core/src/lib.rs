//! Thermal states of one-dimensional quantum spin chains and the effective
//! temperature of their reduced blocks.
//!
//! The crate is organised bottom-up:
//!
//! - [`qstate`]: dense operators, density matrices, partial traces, Pauli
//!   expansions and the Uhlmann fidelity.
//! - [`hamiltonians`]: the open transverse-field Ising chain, dense Gibbs
//!   states, a symmetry-resolved exact diagonaliser for chains up to 14 sites
//!   and the classical Ising transfer-matrix marginal.
//! - [`exact_ising`]: thermodynamic-limit correlators from the fermionic
//!   two-point function `G_r` and the two-spin reduced states built from them.
//! - [`mps`]: purified matrix product states evolved in imaginary time for
//!   chains of ~50 sites.
//! - [`thermometry`]: fidelity maps, effective local temperature search,
//!   finite-difference sensitivities and the grid sweep driver.
//!
//! Sites are indexed from zero. In every dense operator the first site is the
//! most significant bit of the computational-basis index, and `|0>` is the
//! `σz = +1` eigenstate.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exact_ising;
pub mod hamiltonians;
pub mod mps;
pub mod parallel;
pub mod qstate;
pub mod thermometry;

pub use error::{Error, Result};
pub use faer::c64;
