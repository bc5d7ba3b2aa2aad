//! The open transverse-field Ising chain: dense Hamiltonians, Gibbs states,
//! exact diagonalisation and the classical pair marginal.

mod classical;
mod model;
mod spectrum;

pub use classical::{classical_block_marginal, PairTable};
pub use model::{
    bond_hamiltonians, build_dense, gibbs_dense, local_block_hamiltonian, Boundary, InverseTemperature, Model,
    SpinChainSpec, DEFAULT_BETA_MAX, DENSE_SITE_LIMIT,
};
pub use spectrum::ExactSpectrum;
