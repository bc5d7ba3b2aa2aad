//! Thermal descriptions of reduced blocks: fidelity against the block's own
//! Gibbs state, the effective local temperature, their sensitivities to the
//! field, and the grid sweep driver.

mod backend;
mod optimize;
mod reference;
mod studies;
mod sweep;

pub use backend::{Backend, MpsConfig, ReducedStates, DEFAULT_MPS_SITES};
pub use optimize::{
    optimize_for_state, optimize_local_beta, LocalTempResult, OptimizerOptions, COARSE_GRID_POINTS, DEFAULT_BETA_TOL,
    DEFAULT_BRACKET_HIGH_MIN, DEFAULT_BRACKET_LOW, PLATEAU_TOL,
};
pub use reference::ThermalReference;
pub use studies::{
    distant_pair_fidelity, fidelity_derivative_h, intensive_fidelity, local_beta_derivative_h, neighbor_fidelity,
    DerivativeEstimate, DEFAULT_H_STEP, DERIVATIVE_BETA_TOL, DERIVATIVE_FLAG_RATIO,
};
pub use sweep::{
    evaluate_point, run_sweep, run_sweep_sequential, run_sweep_with, GridPoint, PointOutcome, Study, SweepGrid,
    SweepRow,
};
