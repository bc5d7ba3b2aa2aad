//! Correlators and two-spin reduced states of the infinite transverse-field
//! Ising chain at finite temperature.
//!
//! Sign convention: `<σz> = G_0` and `<σz σz> = G_0^2 - G_r G_{-r}`, both on
//! the Pauli scale. With the antiferromagnetic `+σxσx` coupling,
//! nearest-neighbour `<σxσx>` is negative.

mod correlators;
pub mod quadrature;

pub use correlators::{
    build_pair_rdm, compute_g, magnetization_z, reference_distant_pair, xx_correlator, yy_correlator, zz_correlator,
    CorrelatorTable, PairRdm, DEFAULT_QUAD_TOL,
};
