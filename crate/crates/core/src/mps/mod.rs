//! Purified matrix product states for thermal states of long chains.
//!
//! Each site carries a spin `s` and an ancilla `a`, combined into one index
//! `p = 2s + a`. Starting from the maximally entangled `β = 0` product state,
//! imaginary-time gates act on the spins only, so after evolving to `β` the
//! spins alone are in `e^{-βH} / Z`.

mod checkpoint;
mod evolution;
mod observables;
mod state;

pub use checkpoint::{CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use evolution::{
    TrotterSchedule, TruncationConfig, DEFAULT_BOND_DIM, DEFAULT_DT, DEFAULT_ERROR_BUDGET, DEFAULT_SV_CUTOFF, DT_MAX,
};
pub use observables::{Environments, RdmMethod, DIRECT_BLOCK_LIMIT, PAULI_BLOCK_LIMIT};
pub use state::{PurifiedMps, SiteTensor, LOCAL_DIM};

use crate::error::Result;
use crate::hamiltonians::SpinChainSpec;

/// Builds the purified thermal state of `spec` at inverse temperature `beta`.
pub fn thermal_state(spec: &SpinChainSpec, beta: f64, dt: f64, truncation: &TruncationConfig) -> Result<PurifiedMps> {
    let mut state = PurifiedMps::init_infinite_temperature(spec.n)?;
    state.evolve_to_beta(spec, &TrotterSchedule::new(beta, dt)?, truncation)?;
    Ok(state)
}
