use super::backend::Backend;
use super::reference::ThermalReference;
use crate::error::{invalid, Result};
use crate::qstate::DensityMatrix;

/// Points of the coarse logarithmic scan.
pub const COARSE_GRID_POINTS: usize = 64;
/// Default relative tolerance on `β'`.
pub const DEFAULT_BETA_TOL: f64 = 1e-4;
/// Relative fidelity spread below which the tail of the bracket counts as
/// flat.
pub const PLATEAU_TOL: f64 = 1e-6;
/// Lower end of the default bracket.
pub const DEFAULT_BRACKET_LOW: f64 = 1e-3;
/// Floor of the upper end of the default bracket.
pub const DEFAULT_BRACKET_HIGH_MIN: f64 = 50.0;

/// Search settings for [`optimize_local_beta`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerOptions {
    /// `None` uses `[1e-3, max(2β, 50)]`.
    pub bracket: Option<(f64, f64)>,
    /// Relative tolerance on `β'`.
    pub tol: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            bracket: None,
            tol: DEFAULT_BETA_TOL,
        }
    }
}

impl OptimizerOptions {
    pub fn bracket_for(&self, beta: f64) -> (f64, f64) {
        self.bracket
            .unwrap_or((DEFAULT_BRACKET_LOW, (2.0 * beta).max(DEFAULT_BRACKET_HIGH_MIN)))
    }
}

/// Effective inverse temperature of a block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalTempResult {
    pub beta: f64,
    pub h: f64,
    pub m: usize,
    /// `β̃`, the maximiser of `F[Ω_m(β'), ρ̃_m(β)]`.
    pub beta_tilde: f64,
    pub f_opt: f64,
    /// `F[Ω_m(β), ρ̃_m(β)]`.
    pub f_at_global: f64,
    /// The fidelity is flat from the maximum to the top of the bracket;
    /// `β̃` is the smallest `β'` within `PLATEAU_TOL` of the maximum.
    pub plateau_flag: bool,
    /// The maximum sits on a bracket edge without a plateau.
    pub edge_flag: bool,
    pub evaluations: usize,
    pub bracket: (f64, f64),
}

/// Maximises `F[Ω_m(β'), ρ̃_m(β)]` over `β'`.
pub fn optimize_local_beta(
    beta: f64,
    h: f64,
    m: usize,
    backend: &Backend,
    options: &OptimizerOptions,
) -> Result<LocalTempResult> {
    let rho = backend.reduced_state(beta, h, m)?;
    optimize_for_state(&rho, beta, h, m, options)
}

/// As [`optimize_local_beta`] for an already computed `ρ̃_m(β)`.
pub fn optimize_for_state(
    rho: &DensityMatrix,
    beta: f64,
    h: f64,
    m: usize,
    options: &OptimizerOptions,
) -> Result<LocalTempResult> {
    let (lo, hi) = options.bracket_for(beta);
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(invalid(format!("invalid bracket [{lo}, {hi}]")));
    }
    if !(options.tol > 0.0) {
        return Err(invalid(format!("tolerance must be > 0, got {}", options.tol)));
    }
    let reference = ThermalReference::new(h, m, rho)?;
    let mut evaluations = 0usize;
    let mut f = |b: f64| -> Result<f64> {
        evaluations += 1;
        reference.fidelity(b)
    };
    let f_at_global = f(beta)?;

    let (llo, lhi) = (lo.ln(), hi.ln());
    let grid: Vec<f64> = (0..COARSE_GRID_POINTS)
        .map(|i| llo + (lhi - llo) * i as f64 / (COARSE_GRID_POINTS - 1) as f64)
        .collect();
    let values = grid.iter().map(|&x| f(x.exp())).collect::<Result<Vec<_>>>()?;
    let best = values
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &v)| if v > values[acc] { i } else { acc });

    // Golden section on log β' between the neighbours of the best grid point.
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(COARSE_GRID_POINTS - 1)];
    let log_tol = (1.0 + options.tol).ln();
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c.exp())?;
    let mut fd = f(d.exp())?;
    while b - a > log_tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c.exp())?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d.exp())?;
        }
    }
    let (mut x_best, mut f_best) = if fc >= fd { (c, fc) } else { (d, fd) };
    if values[best] > f_best {
        x_best = grid[best];
        f_best = values[best];
    }

    // The optimum can only improve on the global temperature when that
    // lies inside the bracket.
    if beta >= lo && beta <= hi && f_at_global > f_best {
        x_best = beta.ln();
        f_best = f_at_global;
    }

    let f_top = values[COARSE_GRID_POINTS - 1];
    let threshold = f_best * (1.0 - PLATEAU_TOL);
    let plateau_flag = f_top >= threshold && x_best < lhi;
    if plateau_flag {
        // Smallest β' reaching the threshold: first grid point above it,
        // refined by bisection against the previous one. `f_opt` keeps the
        // maximum, which exceeds F(β̃) by at most PLATEAU_TOL.
        let j = values
            .iter()
            .position(|&v| v >= threshold)
            .expect("top of bracket qualifies");
        if j == 0 {
            x_best = grid[0];
        } else {
            let (mut l, mut r) = (grid[j - 1], grid[j]);
            while r - l > log_tol {
                let mid = 0.5 * (l + r);
                if f(mid.exp())? >= threshold {
                    r = mid;
                } else {
                    l = mid;
                }
            }
            x_best = r;
        }
    }
    let edge_flag = !plateau_flag && (best == 0 || best == COARSE_GRID_POINTS - 1);
    Ok(LocalTempResult {
        beta,
        h,
        m,
        beta_tilde: x_best.exp(),
        f_opt: f_best,
        f_at_global,
        plateau_flag,
        edge_flag,
        evaluations,
        bracket: (lo, hi),
    })
}
