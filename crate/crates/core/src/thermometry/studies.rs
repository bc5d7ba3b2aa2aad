use super::backend::Backend;
use super::optimize::{optimize_local_beta, OptimizerOptions};
use super::reference::ThermalReference;
use crate::error::{invalid, Result};
use crate::exact_ising::{build_pair_rdm, reference_distant_pair};
use crate::qstate::fidelity;

/// Default finite-difference step in `h`.
pub const DEFAULT_H_STEP: f64 = 1e-3;
/// Relative disagreement between the step and half-step estimates that
/// flags a derivative.
pub const DERIVATIVE_FLAG_RATIO: f64 = 0.1;
/// Absolute disagreement always accepted.
const DERIVATIVE_ABS_FLOOR: f64 = 1e-6;
/// Optimizer tolerance used inside `∂β̃/∂h`.
pub const DERIVATIVE_BETA_TOL: f64 = 1e-10;

/// `F[Ω_m(β), ρ̃_m(β)]`.
pub fn intensive_fidelity(beta: f64, h: f64, m: usize, backend: &Backend) -> Result<f64> {
    let rho = backend.reduced_state(beta, h, m)?;
    ThermalReference::new(h, m, &rho)?.fidelity(beta)
}

/// A central difference at `step` checked against `step / 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeEstimate {
    pub value: f64,
    pub value_half_step: f64,
    /// `|value - value_half_step|`.
    pub discrepancy: f64,
    pub step: f64,
    /// The two estimates disagree by more than 10%.
    pub flagged: bool,
}

impl DerivativeEstimate {
    fn from_samples(step: f64, f: impl Fn(f64) -> Result<f64>, h: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(invalid(format!("finite-difference step must be > 0, got {step}")));
        }
        let full = (f(h + step)? - f(h - step)?) / (2.0 * step);
        let half = (f(h + step / 2.0)? - f(h - step / 2.0)?) / step;
        let discrepancy = (full - half).abs();
        let scale = full.abs().max(half.abs());
        Ok(Self {
            value: full,
            value_half_step: half,
            discrepancy,
            step,
            flagged: discrepancy > DERIVATIVE_ABS_FLOOR && discrepancy > DERIVATIVE_FLAG_RATIO * scale,
        })
    }
}

/// `∂F[Ω_m(β), ρ̃_m(β)] / ∂h`.
pub fn fidelity_derivative_h(beta: f64, h: f64, m: usize, backend: &Backend, step: f64) -> Result<DerivativeEstimate> {
    DerivativeEstimate::from_samples(step, |x| intensive_fidelity(beta, x, m, backend), h)
}

/// `∂β̃ / ∂h`.
pub fn local_beta_derivative_h(
    beta: f64,
    h: f64,
    m: usize,
    backend: &Backend,
    step: f64,
    options: &OptimizerOptions,
) -> Result<DerivativeEstimate> {
    let tight = OptimizerOptions {
        tol: options.tol.min(DERIVATIVE_BETA_TOL),
        ..*options
    };
    DerivativeEstimate::from_samples(
        step,
        |x| Ok(optimize_local_beta(beta, x, m, backend, &tight)?.beta_tilde),
        h,
    )
}

/// `F[ρ̃_m(β), ρ̃_m(β + Δβ)]`.
pub fn neighbor_fidelity(beta: f64, delta_beta: f64, h: f64, m: usize, backend: &Backend) -> Result<f64> {
    if !(delta_beta >= 0.0) {
        return Err(invalid(format!("Δβ must be >= 0, got {delta_beta}")));
    }
    let a = backend.reduced_state(beta, h, m)?;
    if delta_beta == 0.0 {
        return fidelity(&a, &a);
    }
    let b = backend.reduced_state(beta + delta_beta, h, m)?;
    fidelity(&a, &b)
}

/// `F[Ω_{2,r}(β), ρ̃_{2,r}(β)]`: infinite-chain pair at separation `r`
/// against the end spins of an `(r+1)`-site Gibbs state.
pub fn distant_pair_fidelity(beta: f64, h: f64, r: usize, quad_tol: f64) -> Result<f64> {
    let reference = reference_distant_pair(beta, h, r)?;
    let pair = build_pair_rdm(beta, h, r, quad_tol)?;
    fidelity(&reference, &pair.rho)
}
