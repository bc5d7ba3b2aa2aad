use crate::error::{invalid, Result};
use crate::exact_ising::{build_pair_rdm, DEFAULT_QUAD_TOL};
use crate::hamiltonians::SpinChainSpec;
use crate::mps::{thermal_state, RdmMethod, TruncationConfig, DEFAULT_BOND_DIM, DEFAULT_DT, DEFAULT_SV_CUTOFF};
use crate::qstate::DensityMatrix;

/// Default chain length of the MPS backend.
pub const DEFAULT_MPS_SITES: usize = 50;

/// Finite-chain purified MPS settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MpsConfig {
    pub n: usize,
    pub bond_dim: usize,
    pub dt: f64,
    pub cutoff: f64,
    pub method: RdmMethod,
    /// First site of the block; `None` centers it.
    pub first_site: Option<usize>,
}

impl Default for MpsConfig {
    fn default() -> Self {
        Self {
            n: DEFAULT_MPS_SITES,
            bond_dim: DEFAULT_BOND_DIM,
            dt: DEFAULT_DT,
            cutoff: DEFAULT_SV_CUTOFF,
            method: RdmMethod::DirectContraction,
            first_site: None,
        }
    }
}

/// Source of the reduced state `ρ̃_m(β)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Backend {
    /// Infinite chain through the `G_r` quadrature; only `m = 2`.
    Exact { quad_tol: f64 },
    /// Finite chain through a purified MPS.
    Mps(MpsConfig),
}

impl Default for Backend {
    fn default() -> Self {
        Backend::Exact {
            quad_tol: DEFAULT_QUAD_TOL,
        }
    }
}

/// Reduced states for several block sizes at one `(β, h)`.
#[derive(Clone, Debug)]
pub struct ReducedStates {
    pub states: Vec<DensityMatrix>,
    /// Accumulated truncation error of the MPS, if one was used.
    pub truncation_error: Option<f64>,
}

impl Backend {
    pub fn validate_block(&self, m: usize) -> Result<()> {
        if m < 2 {
            return Err(invalid(format!("block size must be >= 2, got {m}")));
        }
        match self {
            Backend::Exact { .. } if m != 2 => Err(invalid(format!(
                "the exact backend provides two-site blocks only; m = {m} needs the MPS backend"
            ))),
            Backend::Mps(cfg) if m > cfg.n => Err(invalid(format!("block of {m} sites exceeds chain of {}", cfg.n))),
            _ => Ok(()),
        }
    }

    /// `ρ̃_m(β)` for each `m` in `ms`; a single MPS serves all of them.
    pub fn reduced_states(&self, beta: f64, h: f64, ms: &[usize]) -> Result<ReducedStates> {
        for &m in ms {
            self.validate_block(m)?;
        }
        match self {
            Backend::Exact { quad_tol } => {
                let rho = build_pair_rdm(beta, h, 1, *quad_tol)?.rho;
                Ok(ReducedStates {
                    states: vec![rho; ms.len()],
                    truncation_error: None,
                })
            }
            Backend::Mps(cfg) => {
                let spec = SpinChainSpec::new(cfg.n, h)?;
                let mut trunc = TruncationConfig::new(cfg.bond_dim)?;
                trunc.cutoff = cfg.cutoff;
                let state = thermal_state(&spec, beta, cfg.dt, &trunc)?;
                let states = ms
                    .iter()
                    .map(|&m| {
                        let first = cfg.first_site.unwrap_or_else(|| state.centered_block_start(m));
                        state.block_rdm(first, m, cfg.method)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(ReducedStates {
                    states,
                    truncation_error: Some(state.truncation_error()),
                })
            }
        }
    }

    pub fn reduced_state(&self, beta: f64, h: f64, m: usize) -> Result<DensityMatrix> {
        Ok(self.reduced_states(beta, h, &[m])?.states.remove(0))
    }
}
