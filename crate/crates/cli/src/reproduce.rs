//! Figure presets: fixed grids and settings regenerated in one command.

use std::path::PathBuf;
use std::time::Instant;

use clap::ValueEnum;
use serde_json::json;
use thermolens::exact_ising::DEFAULT_QUAD_TOL;
use thermolens::thermometry::{Backend, MpsConfig, OptimizerOptions, Study, SweepGrid, DEFAULT_H_STEP};

use crate::args::ReproduceArgs;
use crate::commands::{run_grid, sweep_columns, Progress};
use crate::error::CliError;
use crate::table::{Format, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    /// Two-site fidelity over a log beta by linear h map.
    FidelityMap,
    /// dF/dh at three low temperatures.
    Dfdh,
    /// Fidelity of spin pairs three, five and seven sites apart.
    DistantPairs,
    /// Two-site local beta against beta at five fields.
    LocalTempVsBeta,
    /// Optimal fidelity over the (beta, h) plane.
    FoptMap,
    /// d(beta_tilde)/dh at three low temperatures.
    Dbetadh,
    /// Fidelity between two-site states at neighbouring temperatures.
    NeighborFid,
    /// Local beta against beta for block sizes 2 to 6 (MPS).
    LocalTempMSweep,
    /// Local beta against h for block sizes 2 to 6 (MPS).
    LocalTempVsH,
}

impl FigureId {
    pub fn name(self) -> String {
        self.to_possible_value()
            .expect("no skipped variants")
            .get_name()
            .to_string()
    }
}

/// A grid axis as the preset defines it.
#[derive(Clone, Debug, PartialEq)]
pub enum Axis {
    Linear(f64, f64, usize),
    Log(f64, f64, usize),
    Fixed(Vec<f64>),
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Axis::Fixed(ref v) => v.clone(),
            Axis::Linear(a, b, n) => spaced(a, b, n, |t| a + t * (b - a)),
            Axis::Log(a, b, n) => spaced(a, b, n, |t| a * (b / a).powf(t)),
        }
    }

    fn resampled(&self, count: Option<usize>, flag: &str) -> Result<Axis, CliError> {
        let Some(count) = count else {
            return Ok(self.clone());
        };
        if count == 0 {
            return Err(CliError::Usage(format!("{flag} must be >= 1")));
        }
        match *self {
            Axis::Linear(a, b, _) => Ok(Axis::Linear(a, b, count)),
            Axis::Log(a, b, _) => Ok(Axis::Log(a, b, count)),
            Axis::Fixed(_) => Err(CliError::Usage(format!("{flag}: this preset uses a fixed list"))),
        }
    }

    fn describe(&self) -> serde_json::Value {
        match self {
            Axis::Linear(a, b, n) => json!({"spacing": "linear", "start": a, "end": b, "count": n}),
            Axis::Log(a, b, n) => json!({"spacing": "log", "start": a, "end": b, "count": n}),
            Axis::Fixed(v) => json!({"spacing": "list", "values": v}),
        }
    }
}

fn spaced(a: f64, b: f64, n: usize, at: impl Fn(f64) -> f64) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| match i {
            0 => a,
            i if i == n - 1 => b,
            i => at(i as f64 / (n - 1) as f64),
        })
        .collect()
}

/// Variation concatenated into one dataset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Variant {
    Single,
    Separation(usize),
    Offset(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub id: FigureId,
    pub study: Study,
    pub betas: Axis,
    pub hs: Axis,
    pub ms: Vec<usize>,
    pub backend: Backend,
    pub variants: Vec<Variant>,
}

const PRESET_MPS_SITES: usize = 50;
const PRESET_BOND_DIM: usize = 15;

fn mps_backend() -> Backend {
    Backend::Mps(MpsConfig {
        n: PRESET_MPS_SITES,
        bond_dim: PRESET_BOND_DIM,
        ..MpsConfig::default()
    })
}

impl Preset {
    pub fn new(id: FigureId) -> Self {
        let exact = Backend::Exact {
            quad_tol: DEFAULT_QUAD_TOL,
        };
        let local = Study::LocalTemp(OptimizerOptions::default());
        let base = |study, betas, hs| Preset {
            id,
            study,
            betas,
            hs,
            ms: vec![2],
            backend: exact,
            variants: vec![Variant::Single],
        };
        match id {
            FigureId::FidelityMap => base(Study::Intensive, Axis::Log(0.1, 100.0, 60), Axis::Linear(0.0, 2.0, 80)),
            FigureId::Dfdh => base(
                Study::DfDh { step: DEFAULT_H_STEP },
                Axis::Fixed(vec![50.0, 100.0, 500.0]),
                Axis::Linear(0.0, 2.0, 201),
            ),
            FigureId::DistantPairs => Preset {
                variants: [3, 5, 7].map(Variant::Separation).to_vec(),
                ..base(Study::Distant, Axis::Fixed(vec![10.0]), Axis::Linear(0.0, 2.0, 81))
            },
            FigureId::LocalTempVsBeta => base(
                local,
                Axis::Log(0.1, 1000.0, 60),
                Axis::Fixed(vec![0.2, 0.5, 0.8, 1.0, 1.5]),
            ),
            FigureId::FoptMap => base(local, Axis::Log(0.1, 1000.0, 40), Axis::Linear(0.0, 2.0, 80)),
            FigureId::Dbetadh => base(
                Study::DbetaDh {
                    step: DEFAULT_H_STEP,
                    options: OptimizerOptions::default(),
                },
                Axis::Fixed(vec![100.0, 250.0, 1000.0]),
                Axis::Linear(0.0, 2.0, 101),
            ),
            FigureId::NeighborFid => Preset {
                variants: [0.3, 0.5, 0.7].map(Variant::Offset).to_vec(),
                ..base(
                    Study::Neighbor { delta_beta: 0.5 },
                    Axis::Log(0.1, 100.0, 60),
                    Axis::Fixed(vec![0.1]),
                )
            },
            FigureId::LocalTempMSweep => Preset {
                ms: (2..=6).collect(),
                backend: mps_backend(),
                ..base(local, Axis::Linear(1.0, 30.0, 30), Axis::Fixed(vec![0.8]))
            },
            FigureId::LocalTempVsH => Preset {
                ms: (2..=6).collect(),
                backend: mps_backend(),
                ..base(local, Axis::Fixed(vec![15.0]), Axis::Linear(0.0, 2.0, 20))
            },
        }
    }

    /// Applies the `reproduce` overrides.
    pub fn with_overrides(mut self, args: &ReproduceArgs) -> Result<Self, CliError> {
        self.betas = self.betas.resampled(args.beta_count, "--beta-count")?;
        self.hs = self.hs.resampled(args.h_count, "--h-count")?;
        match &mut self.backend {
            Backend::Mps(c) => {
                if let Some(n) = args.n {
                    c.n = n;
                }
                if let Some(d) = args.bond_dim {
                    if d == 0 {
                        return Err(CliError::Usage("--bond-dim must be >= 1".into()));
                    }
                    c.bond_dim = d;
                }
            }
            Backend::Exact { .. } if args.n.is_some() || args.bond_dim.is_some() => {
                return Err(CliError::Usage(format!(
                    "{} uses the exact backend; --n and --bond-dim do not apply",
                    self.id.name()
                )));
            }
            Backend::Exact { .. } => {}
        }
        Ok(self)
    }

    /// One sweep per variant, in output order.
    pub fn runs(&self) -> Vec<(SweepGrid, Study)> {
        self.variants
            .iter()
            .map(|v| {
                let mut grid = SweepGrid {
                    betas: self.betas.values(),
                    hs: self.hs.values(),
                    ms: self.ms.clone(),
                    r: 1,
                    backend: self.backend,
                };
                let mut study = self.study;
                match *v {
                    Variant::Single => {}
                    Variant::Separation(r) => grid.r = r,
                    Variant::Offset(delta_beta) => study = Study::Neighbor { delta_beta },
                }
                (grid, study)
            })
            .collect()
    }

    fn describe(&self) -> serde_json::Value {
        let backend = match self.backend {
            Backend::Exact { quad_tol } => json!({"kind": "exact", "quad_tol": quad_tol}),
            Backend::Mps(c) => json!({
                "kind": "mps",
                "n": c.n,
                "bond_dim": c.bond_dim,
                "dt": c.dt,
                "cutoff": c.cutoff,
                "rdm_method": format!("{:?}", c.method),
            }),
        };
        let variants: Vec<_> = self
            .variants
            .iter()
            .filter_map(|v| match *v {
                Variant::Single => None,
                Variant::Separation(r) => Some(json!({"r": r})),
                Variant::Offset(d) => Some(json!({"delta_beta": d})),
            })
            .collect();
        let mut study = json!({"name": self.study.name()});
        match self.study {
            Study::LocalTemp(o) => study["tol"] = json!(o.tol),
            Study::DfDh { step } => study["step"] = json!(step),
            Study::DbetaDh { step, options } => {
                study["step"] = json!(step);
                study["tol"] = json!(options.tol);
            }
            _ => {}
        }
        json!({
            "study": study,
            "beta": self.betas.describe(),
            "h": self.hs.describe(),
            "m": self.ms,
            "backend": backend,
            "variants": variants,
        })
    }
}

pub fn reproduce(args: &ReproduceArgs) -> Result<(), CliError> {
    let preset = Preset::new(args.id).with_overrides(args)?;
    let jobs = match args.jobs {
        Some(0) => return Err(CliError::Usage("--jobs must be >= 1".into())),
        Some(j) => j,
        None => thermolens::parallel::default_jobs(),
    };
    let runs = preset.runs();
    for (grid, study) in &runs {
        grid.validate(study)?;
    }
    std::fs::create_dir_all(&args.out_dir)?;
    let name = args.id.name();
    let ext = match args.format {
        Format::Csv => "csv",
        Format::Jsonl => "jsonl",
    };
    let data_name = format!("{name}.{ext}");
    let data_path: PathBuf = args.out_dir.join(&data_name);
    let mut table = Table::create(Some(&data_path), args.format, sweep_columns(&runs[0].1))?;

    let start = Instant::now();
    let mut failed = 0;
    for (i, (grid, study)) in runs.iter().enumerate() {
        let label = if runs.len() > 1 {
            format!("{name} [{}/{}]", i + 1, runs.len())
        } else {
            name.clone()
        };
        let progress = Progress::new(label, args.quiet);
        failed += run_grid(grid, study, jobs, 4 * jobs, &mut table, &progress)?;
    }
    table.flush()?;

    let meta = json!({
        "figure": name,
        "version": env!("CARGO_PKG_VERSION"),
        "dataset": data_name,
        "format": ext,
        "parameters": preset.describe(),
        "rows": table.rows(),
        "failed_points": failed,
        "runtime_seconds": start.elapsed().as_secs_f64(),
    });
    let meta_path = args.out_dir.join(format!("{name}.meta.json"));
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta)? + "\n")?;
    if failed > 0 {
        return Err(CliError::Numerical(format!(
            "{failed} grid points failed; see {}",
            data_path.display()
        )));
    }
    Ok(())
}
