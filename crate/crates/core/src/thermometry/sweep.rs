use super::backend::Backend;
use super::optimize::{optimize_for_state, LocalTempResult, OptimizerOptions};
use super::reference::ThermalReference;
use super::studies::{distant_pair_fidelity, fidelity_derivative_h, local_beta_derivative_h, DerivativeEstimate};
use crate::error::{invalid, Result};
use crate::exact_ising::DEFAULT_QUAD_TOL;
use crate::parallel;
use crate::qstate::fidelity;

/// Rectangular `(β, h)` grid, evaluated for every block size in `ms`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub betas: Vec<f64>,
    pub hs: Vec<f64>,
    pub ms: Vec<usize>,
    /// Pair separation for the distant-pair study.
    pub r: usize,
    pub backend: Backend,
}

/// What to compute at each grid point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Study {
    Intensive,
    LocalTemp(OptimizerOptions),
    DfDh { step: f64 },
    DbetaDh { step: f64, options: OptimizerOptions },
    Neighbor { delta_beta: f64 },
    Distant,
}

impl Study {
    pub fn name(&self) -> &'static str {
        match self {
            Study::Intensive => "intensive",
            Study::LocalTemp(_) => "local-temp",
            Study::DfDh { .. } => "dfdh",
            Study::DbetaDh { .. } => "dbeta-dh",
            Study::Neighbor { .. } => "neighbor",
            Study::Distant => "distant",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub beta: f64,
    pub h: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PointOutcome {
    Fidelity(f64),
    LocalTemp(LocalTempResult),
    Derivative(DerivativeEstimate),
}

/// One output row: a grid point, a block size and the study's values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub beta: f64,
    pub h: f64,
    pub m: usize,
    pub r: Option<usize>,
    pub delta_beta: Option<f64>,
    pub outcome: PointOutcome,
    pub truncation_error: Option<f64>,
}

fn check_axis(name: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(invalid(format!("{name} axis is empty")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(invalid(format!("{name} axis contains non-finite values")));
    }
    if values.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid(format!("{name} axis must be ascending")));
    }
    Ok(())
}

impl SweepGrid {
    pub fn validate(&self, study: &Study) -> Result<()> {
        check_axis("beta", &self.betas)?;
        check_axis("h", &self.hs)?;
        if self.betas[0] < 0.0 {
            return Err(invalid("inverse temperatures must be >= 0"));
        }
        if let Study::Distant = study {
            if self.r == 0 {
                return Err(invalid("separation r must be >= 1"));
            }
            return Ok(());
        }
        if self.ms.is_empty() {
            return Err(invalid("no block sizes given"));
        }
        for &m in &self.ms {
            self.backend.validate_block(m)?;
        }
        Ok(())
    }

    /// Grid points, `β` outer and `h` inner.
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::with_capacity(self.betas.len() * self.hs.len());
        for &beta in &self.betas {
            for &h in &self.hs {
                out.push(GridPoint {
                    index: out.len(),
                    beta,
                    h,
                });
            }
        }
        out
    }
}

/// All rows of one grid point, one per block size.
pub fn evaluate_point(grid: &SweepGrid, study: &Study, beta: f64, h: f64) -> Result<Vec<SweepRow>> {
    let row = |m: usize, outcome: PointOutcome, trunc: Option<f64>| SweepRow {
        beta,
        h,
        m,
        r: None,
        delta_beta: None,
        outcome,
        truncation_error: trunc,
    };
    match study {
        Study::Intensive => {
            let reduced = grid.backend.reduced_states(beta, h, &grid.ms)?;
            grid.ms
                .iter()
                .zip(&reduced.states)
                .map(|(&m, rho)| {
                    let f = ThermalReference::new(h, m, rho)?.fidelity(beta)?;
                    Ok(row(m, PointOutcome::Fidelity(f), reduced.truncation_error))
                })
                .collect()
        }
        Study::LocalTemp(options) => {
            let reduced = grid.backend.reduced_states(beta, h, &grid.ms)?;
            grid.ms
                .iter()
                .zip(&reduced.states)
                .map(|(&m, rho)| {
                    let res = optimize_for_state(rho, beta, h, m, options)?;
                    Ok(row(m, PointOutcome::LocalTemp(res), reduced.truncation_error))
                })
                .collect()
        }
        Study::DfDh { step } => grid
            .ms
            .iter()
            .map(|&m| {
                let d = fidelity_derivative_h(beta, h, m, &grid.backend, *step)?;
                Ok(row(m, PointOutcome::Derivative(d), None))
            })
            .collect(),
        Study::DbetaDh { step, options } => grid
            .ms
            .iter()
            .map(|&m| {
                let d = local_beta_derivative_h(beta, h, m, &grid.backend, *step, options)?;
                Ok(row(m, PointOutcome::Derivative(d), None))
            })
            .collect(),
        Study::Neighbor { delta_beta } => {
            if !(*delta_beta >= 0.0) {
                return Err(invalid(format!("Δβ must be >= 0, got {delta_beta}")));
            }
            let a = grid.backend.reduced_states(beta, h, &grid.ms)?;
            let b = grid.backend.reduced_states(beta + delta_beta, h, &grid.ms)?;
            let trunc = match (a.truncation_error, b.truncation_error) {
                (Some(x), Some(y)) => Some(x.max(y)),
                _ => None,
            };
            grid.ms
                .iter()
                .zip(a.states.iter().zip(&b.states))
                .map(|(&m, (ra, rb))| {
                    let mut r = row(m, PointOutcome::Fidelity(fidelity(ra, rb)?), trunc);
                    r.delta_beta = Some(*delta_beta);
                    Ok(r)
                })
                .collect()
        }
        Study::Distant => {
            let quad_tol = match grid.backend {
                Backend::Exact { quad_tol } => quad_tol,
                Backend::Mps(_) => DEFAULT_QUAD_TOL,
            };
            let f = distant_pair_fidelity(beta, h, grid.r, quad_tol)?;
            let mut r = row(2, PointOutcome::Fidelity(f), None);
            r.r = Some(grid.r);
            Ok(vec![r])
        }
    }
}

/// Evaluates every grid point with up to `jobs` workers, `chunk` points at
/// a time, handing results to `sink` in grid order as each chunk finishes.
/// Stops early if `sink` fails.
pub fn run_sweep_with<S>(grid: &SweepGrid, study: &Study, jobs: usize, chunk: usize, mut sink: S) -> Result<()>
where
    S: FnMut(GridPoint, Result<Vec<SweepRow>>) -> Result<()>,
{
    grid.validate(study)?;
    let points = grid.points();
    for block in points.chunks(chunk.max(1)) {
        let results = parallel::map(block, jobs, |p| evaluate_point(grid, study, p.beta, p.h));
        for (p, r) in block.iter().zip(results) {
            sink(*p, r)?;
        }
    }
    Ok(())
}

/// Evaluates the whole grid; results are in grid order.
pub fn run_sweep(grid: &SweepGrid, study: &Study, jobs: usize) -> Result<Vec<Result<Vec<SweepRow>>>> {
    grid.validate(study)?;
    let points = grid.points();
    Ok(parallel::map(&points, jobs, |p| {
        evaluate_point(grid, study, p.beta, p.h)
    }))
}

/// Sequential reference for [`run_sweep`].
pub fn run_sweep_sequential(grid: &SweepGrid, study: &Study) -> Result<Vec<Result<Vec<SweepRow>>>> {
    grid.validate(study)?;
    let points = grid.points();
    Ok(parallel::map_sequential(&points, |p| {
        evaluate_point(grid, study, p.beta, p.h)
    }))
}
