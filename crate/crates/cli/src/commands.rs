use std::time::Instant;

use thermolens::exact_ising::{magnetization_z, xx_correlator, yy_correlator, zz_correlator, CorrelatorTable};
use thermolens::mps::RdmMethod;
use thermolens::parallel;
use thermolens::thermometry::{
    evaluate_point, Backend, MpsConfig, OptimizerOptions, PointOutcome, Study, SweepGrid, SweepRow,
};

use crate::args::{BackendKind, CorrelatorsArgs, ModelArgs, RdmMethodArg, StudyKind, SweepArgs};
use crate::error::CliError;
use crate::grid::parse_axis;
use crate::table::{Cell, Table};

pub const CORRELATOR_COLUMNS: [&str; 9] = ["beta", "h", "r", "g", "xx", "yy", "zz", "mz", "quad_tol"];

/// One `(β, h)` block of the correlator table: rows for `r = -r_max..=r_max`.
pub fn correlator_rows(beta: f64, h: f64, r_max: usize, quad_tol: f64) -> thermolens::Result<Vec<Vec<Cell>>> {
    let table = CorrelatorTable::new(beta, h, r_max, quad_tol)?;
    let mz = magnetization_z(&table);
    let r_max = r_max as i64;
    (-r_max..=r_max)
        .map(|r| {
            let (xx, yy, zz) = if r >= 1 {
                let k = r as usize;
                (
                    Cell::F(xx_correlator(&table, k)?),
                    Cell::F(yy_correlator(&table, k)?),
                    Cell::F(zz_correlator(&table, k)?),
                )
            } else {
                (Cell::Empty, Cell::Empty, Cell::Empty)
            };
            Ok(vec![
                Cell::F(beta),
                Cell::F(h),
                Cell::I(r),
                Cell::F(table.g(r)?),
                xx,
                yy,
                zz,
                Cell::F(mz),
                Cell::F(quad_tol),
            ])
        })
        .collect()
}

pub fn correlators(args: &CorrelatorsArgs) -> Result<(), CliError> {
    let betas = args.beta.values()?;
    let hs = parse_axis(&args.h, false).map_err(CliError::Usage)?;
    if !(args.quad_tol > 0.0) {
        return Err(CliError::Usage("--quad-tol must be > 0".into()));
    }
    let jobs = args.out.jobs()?;
    let points: Vec<(f64, f64)> = betas.iter().flat_map(|&b| hs.iter().map(move |&h| (b, h))).collect();
    let mut table = Table::create(args.out.output.as_deref(), args.out.format, CORRELATOR_COLUMNS.to_vec())?;
    let results = parallel::map(&points, jobs, |&(b, h)| {
        correlator_rows(b, h, args.r_max, args.quad_tol)
    });
    let mut failed = 0;
    for ((b, h), res) in points.iter().zip(results) {
        match res {
            Ok(rows) => {
                for row in rows {
                    table.write_row(&row)?;
                }
            }
            Err(e) => {
                failed += 1;
                eprintln!("beta = {b}, h = {h}: {e}");
            }
        }
    }
    table.flush()?;
    if failed > 0 {
        return Err(CliError::Numerical(format!(
            "{failed} of {} grid points failed",
            points.len()
        )));
    }
    Ok(())
}

/// Backend from the model flags; `mps` unless every block has two sites.
pub fn backend_from(model: &ModelArgs, ms: &[usize]) -> Result<Backend, CliError> {
    if !(model.quad_tol > 0.0) {
        return Err(CliError::Usage("--quad-tol must be > 0".into()));
    }
    let kind = model.backend.unwrap_or(if ms.iter().all(|&m| m == 2) {
        BackendKind::Exact
    } else {
        BackendKind::Mps
    });
    Ok(match kind {
        BackendKind::Exact => Backend::Exact {
            quad_tol: model.quad_tol,
        },
        BackendKind::Mps => {
            if model.bond_dim == 0 {
                return Err(CliError::Usage("--bond-dim must be >= 1".into()));
            }
            if !(model.dt > 0.0 && model.dt <= thermolens::mps::DT_MAX) {
                return Err(CliError::Usage(format!(
                    "--dt must lie in (0, {}]",
                    thermolens::mps::DT_MAX
                )));
            }
            Backend::Mps(MpsConfig {
                n: model.n,
                bond_dim: model.bond_dim,
                dt: model.dt,
                cutoff: model.cutoff,
                method: match model.rdm_method {
                    RdmMethodArg::Direct => RdmMethod::DirectContraction,
                    RdmMethodArg::Pauli => RdmMethod::PauliReconstruction,
                },
                first_site: None,
            })
        }
    })
}

pub fn optimizer_from(model: &ModelArgs) -> Result<OptimizerOptions, CliError> {
    let bracket = match &model.bracket {
        None => None,
        Some(text) => {
            let (lo, hi) = text
                .split_once(':')
                .and_then(|(a, b)| Some((a.trim().parse::<f64>().ok()?, b.trim().parse::<f64>().ok()?)))
                .ok_or_else(|| CliError::Usage(format!("--bracket `{text}` must look like lo:hi")))?;
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(CliError::Usage(format!("--bracket needs 0 < lo < hi, got {text}")));
            }
            Some((lo, hi))
        }
    };
    if !(model.tol > 0.0) {
        return Err(CliError::Usage("--tol must be > 0".into()));
    }
    Ok(OptimizerOptions {
        bracket,
        tol: model.tol,
    })
}

pub fn study_from(kind: StudyKind, model: &ModelArgs, delta_beta: f64) -> Result<Study, CliError> {
    let step_ok = model.step > 0.0 && model.step.is_finite();
    Ok(match kind {
        StudyKind::Intensive => Study::Intensive,
        StudyKind::LocalTemp => Study::LocalTemp(optimizer_from(model)?),
        StudyKind::Dfdh | StudyKind::DbetaDh if !step_ok => return Err(CliError::Usage("--step must be > 0".into())),
        StudyKind::Dfdh => Study::DfDh { step: model.step },
        StudyKind::DbetaDh => Study::DbetaDh {
            step: model.step,
            options: optimizer_from(model)?,
        },
        StudyKind::Neighbor => {
            if !(delta_beta >= 0.0 && delta_beta.is_finite()) {
                return Err(CliError::Usage("--delta-beta must be >= 0".into()));
            }
            Study::Neighbor { delta_beta }
        }
        StudyKind::Distant => Study::Distant,
    })
}

/// Column list of a study's dataset.
pub fn sweep_columns(study: &Study) -> Vec<&'static str> {
    let mut cols = vec!["study", "backend", "beta", "h", "m", "n", "bond_dim", "dt", "quad_tol"];
    cols.extend_from_slice(match study {
        Study::Intensive => &["fidelity"][..],
        Study::LocalTemp(_) => &[
            "tol",
            "bracket_lo",
            "bracket_hi",
            "beta_tilde",
            "f_opt",
            "f_at_global",
            "plateau_flag",
            "edge_flag",
            "evaluations",
        ][..],
        Study::DfDh { .. } => &["step", "derivative", "derivative_half_step", "discrepancy", "flagged"][..],
        Study::DbetaDh { .. } => &[
            "step",
            "tol",
            "derivative",
            "derivative_half_step",
            "discrepancy",
            "flagged",
        ][..],
        Study::Neighbor { .. } => &["delta_beta", "fidelity"][..],
        Study::Distant => &["r", "fidelity"][..],
    });
    cols.push("truncation_error");
    cols
}

/// Cells of one row, matching [`sweep_columns`].
pub fn sweep_cells(grid: &SweepGrid, study: &Study, row: &SweepRow) -> Vec<Cell> {
    let (backend, n, d, dt, quad_tol) = match (&grid.backend, study) {
        (_, Study::Distant) => ("exact", None, None, None, Some(distant_tol(&grid.backend))),
        (Backend::Exact { quad_tol }, _) => ("exact", None, None, None, Some(*quad_tol)),
        (Backend::Mps(c), _) => ("mps", Some(c.n), Some(c.bond_dim), Some(c.dt), None),
    };
    let mut cells = vec![
        Cell::S(study.name().into()),
        Cell::S(backend.into()),
        Cell::F(row.beta),
        Cell::F(row.h),
        Cell::U(row.m),
        Cell::opt_u(n),
        Cell::opt_u(d),
        Cell::opt_f(dt),
        Cell::opt_f(quad_tol),
    ];
    match (study, &row.outcome) {
        (Study::Intensive, PointOutcome::Fidelity(f)) => cells.push(Cell::F(*f)),
        (Study::LocalTemp(opts), PointOutcome::LocalTemp(r)) => cells.extend([
            Cell::F(opts.tol),
            Cell::F(r.bracket.0),
            Cell::F(r.bracket.1),
            Cell::F(r.beta_tilde),
            Cell::F(r.f_opt),
            Cell::F(r.f_at_global),
            Cell::B(r.plateau_flag),
            Cell::B(r.edge_flag),
            Cell::U(r.evaluations),
        ]),
        (Study::DfDh { step }, PointOutcome::Derivative(d)) => cells.extend([
            Cell::F(*step),
            Cell::F(d.value),
            Cell::F(d.value_half_step),
            Cell::F(d.discrepancy),
            Cell::B(d.flagged),
        ]),
        (Study::DbetaDh { step, options }, PointOutcome::Derivative(d)) => cells.extend([
            Cell::F(*step),
            Cell::F(options.tol),
            Cell::F(d.value),
            Cell::F(d.value_half_step),
            Cell::F(d.discrepancy),
            Cell::B(d.flagged),
        ]),
        (Study::Neighbor { delta_beta }, PointOutcome::Fidelity(f)) => {
            cells.extend([Cell::F(row.delta_beta.unwrap_or(*delta_beta)), Cell::F(*f)])
        }
        (Study::Distant, PointOutcome::Fidelity(f)) => cells.extend([Cell::opt_u(row.r), Cell::F(*f)]),
        _ => unreachable!("outcome does not match study"),
    }
    cells.push(Cell::opt_f(row.truncation_error));
    cells
}

fn distant_tol(backend: &Backend) -> f64 {
    match backend {
        Backend::Exact { quad_tol } => *quad_tol,
        Backend::Mps(_) => thermolens::exact_ising::DEFAULT_QUAD_TOL,
    }
}

/// Progress messages on standard error.
pub struct Progress {
    quiet: bool,
    label: String,
    start: Instant,
}

impl Progress {
    pub fn new(label: impl Into<String>, quiet: bool) -> Self {
        Self {
            quiet,
            label: label.into(),
            start: Instant::now(),
        }
    }

    fn report(&self, done: usize, total: usize) {
        if !self.quiet {
            eprintln!(
                "{}: {done}/{total} points ({:.1} s)",
                self.label,
                self.start.elapsed().as_secs_f64()
            );
        }
    }
}

/// Runs `grid` chunk by chunk, writing rows in grid order and flushing
/// after each chunk. Returns the number of failed grid points.
pub fn run_grid(
    grid: &SweepGrid,
    study: &Study,
    jobs: usize,
    chunk: usize,
    table: &mut Table,
    progress: &Progress,
) -> Result<usize, CliError> {
    grid.validate(study)?;
    let points = grid.points();
    let mut failed = 0;
    let mut done = 0;
    for block in points.chunks(chunk.max(1)) {
        let results = parallel::map(block, jobs, |p| evaluate_point(grid, study, p.beta, p.h));
        for (p, res) in block.iter().zip(results) {
            match res {
                Ok(rows) => {
                    for row in &rows {
                        table.write_row(&sweep_cells(grid, study, row))?;
                    }
                }
                Err(e) => {
                    failed += 1;
                    eprintln!("beta = {}, h = {}: {e}", p.beta, p.h);
                }
            }
        }
        table.flush()?;
        done += block.len();
        progress.report(done, points.len());
    }
    Ok(failed)
}

pub fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let betas = args.beta.values()?;
    let hs = parse_axis(&args.h, false).map_err(CliError::Usage)?;
    let study = study_from(args.study, &args.model, args.delta_beta)?;
    if args.study == StudyKind::Distant && args.model.backend == Some(BackendKind::Mps) {
        return Err(CliError::Usage("the distant study uses the exact backend only".into()));
    }
    let ms = if args.study == StudyKind::Distant {
        vec![2]
    } else {
        args.m.clone()
    };
    let grid = SweepGrid {
        betas,
        hs,
        backend: backend_from(&args.model, &ms)?,
        ms,
        r: args.r,
    };
    grid.validate(&study)?;
    let jobs = args.out.jobs()?;
    let chunk = args.chunk.unwrap_or(4 * jobs);
    let mut table = Table::create(args.out.output.as_deref(), args.out.format, sweep_columns(&study))?;
    let progress = Progress::new(study.name(), args.out.quiet);
    let failed = run_grid(&grid, &study, jobs, chunk, &mut table, &progress)?;
    if failed > 0 {
        return Err(CliError::Numerical(format!(
            "{failed} of {} grid points failed",
            grid.points().len()
        )));
    }
    Ok(())
}
