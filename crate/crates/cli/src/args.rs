//! Command-line flags and the `--config` file.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thermolens::exact_ising::DEFAULT_QUAD_TOL;
use thermolens::mps::{DEFAULT_BOND_DIM, DEFAULT_DT, DEFAULT_SV_CUTOFF};
use thermolens::thermometry::{DEFAULT_BETA_TOL, DEFAULT_H_STEP, DEFAULT_MPS_SITES};

use crate::error::CliError;
use crate::grid::parse_axis;
use crate::reproduce::FigureId;
use crate::table::Format;

#[derive(Debug, Parser)]
#[command(
    name = "thermolens",
    version,
    about = "Thermal reduced states of the transverse-field Ising chain"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// Flat `key = value` file of long flags; flags on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate G_r and the two-point correlators of the infinite chain.
    Correlators(CorrelatorsArgs),
    /// Evaluate one study over a (beta, h) grid.
    Sweep(SweepArgs),
    /// Regenerate the dataset behind a figure preset.
    Reproduce(ReproduceArgs),
}

/// Inverse temperatures, linear or logarithmic.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct BetaAxis {
    /// `x`, `a,b,c` or `start:end:count`, linearly spaced.
    #[arg(long, value_name = "GRID", allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// `start:end:count`, logarithmically spaced.
    #[arg(long = "beta-log", value_name = "GRID")]
    pub beta_log: Option<String>,
}

impl BetaAxis {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        let v = match (&self.beta, &self.beta_log) {
            (Some(s), None) => parse_axis(s, false),
            (None, Some(s)) => parse_axis(s, true),
            _ => Err("give exactly one of --beta and --beta-log".into()),
        }
        .map_err(CliError::Usage)?;
        if v[0] < 0.0 {
            return Err(CliError::Usage("inverse temperatures must be >= 0".into()));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long, short, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads; defaults to the number of logical cores.
    #[arg(long, env = "THERMOLENS_JOBS")]
    pub jobs: Option<usize>,
    /// No progress messages.
    #[arg(long)]
    pub quiet: bool,
}

impl OutputArgs {
    pub fn jobs(&self) -> Result<usize, CliError> {
        match self.jobs {
            Some(0) => Err(CliError::Usage("--jobs must be >= 1".into())),
            Some(j) => Ok(j),
            None => Ok(thermolens::parallel::default_jobs()),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CorrelatorsArgs {
    #[command(flatten)]
    pub beta: BetaAxis,
    /// Transverse fields.
    #[arg(long, value_name = "GRID", allow_hyphen_values = true)]
    pub h: String,
    /// Rows for r = -r_max ..= r_max.
    #[arg(long, default_value_t = 1)]
    pub r_max: usize,
    #[arg(long, default_value_t = DEFAULT_QUAD_TOL)]
    pub quad_tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StudyKind {
    Intensive,
    LocalTemp,
    Dfdh,
    DbetaDh,
    Neighbor,
    Distant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendKind {
    Exact,
    Mps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RdmMethodArg {
    Direct,
    Pauli,
}

/// Settings shared by every study.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Reduced-state source; exact for m = 2, mps otherwise.
    #[arg(long, value_enum)]
    pub backend: Option<BackendKind>,
    /// MPS chain length.
    #[arg(long, default_value_t = DEFAULT_MPS_SITES)]
    pub n: usize,
    /// MPS bond dimension cap.
    #[arg(long, default_value_t = DEFAULT_BOND_DIM)]
    pub bond_dim: usize,
    /// MPS imaginary-time step bound.
    #[arg(long, default_value_t = DEFAULT_DT)]
    pub dt: f64,
    /// MPS relative singular-value cutoff.
    #[arg(long, default_value_t = DEFAULT_SV_CUTOFF)]
    pub cutoff: f64,
    /// How the MPS block state is assembled.
    #[arg(long, value_enum, default_value_t = RdmMethodArg::Direct)]
    pub rdm_method: RdmMethodArg,
    /// Absolute tolerance of the G_r integrals.
    #[arg(long, default_value_t = DEFAULT_QUAD_TOL)]
    pub quad_tol: f64,
    /// Finite-difference step in h.
    #[arg(long, default_value_t = DEFAULT_H_STEP)]
    pub step: f64,
    /// Search bracket `lo:hi` for beta'; default [1e-3, max(2 beta, 50)].
    #[arg(long, value_name = "LO:HI")]
    pub bracket: Option<String>,
    /// Relative tolerance on beta'.
    #[arg(long, default_value_t = DEFAULT_BETA_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub study: StudyKind,
    /// Block sizes.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub m: Vec<usize>,
    #[command(flatten)]
    pub beta: BetaAxis,
    /// Transverse fields.
    #[arg(long, value_name = "GRID", allow_hyphen_values = true)]
    pub h: String,
    /// Pair separation of the distant study.
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    /// Temperature offset of the neighbor study.
    #[arg(long, default_value_t = 0.5)]
    pub delta_beta: f64,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Grid points per flushed chunk; defaults to 4 per worker.
    #[arg(long)]
    pub chunk: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub id: FigureId,
    /// Directory receiving `<id>.<format>` and `<id>.meta.json`.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Resample the preset's beta range with this many points.
    #[arg(long)]
    pub beta_count: Option<usize>,
    /// Resample the preset's h range with this many points.
    #[arg(long)]
    pub h_count: Option<usize>,
    /// Override the MPS chain length of MPS presets.
    #[arg(long)]
    pub n: Option<usize>,
    /// Override the MPS bond dimension of MPS presets.
    #[arg(long)]
    pub bond_dim: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads; defaults to the number of logical cores.
    #[arg(long, env = "THERMOLENS_JOBS")]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub quiet: bool,
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn read_config(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{}:{}: expected `key = value`", path.display(), lineno + 1)))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(CliError::Usage(format!(
                "{}:{}: invalid key `{}`",
                path.display(),
                lineno + 1,
                k.trim()
            )));
        }
        out.push((key, v.trim().trim_matches('"').to_string()));
    }
    Ok(out)
}

/// Splices the config file's flags in right after the subcommand, so that
/// flags given later on the command line override them.
pub fn expand_config(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        } else if a == "--config" {
            path = argv.get(i + 1).map(PathBuf::from);
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let Some(sub) = argv
        .iter()
        .position(|a| matches!(a.as_str(), "correlators" | "sweep" | "reproduce"))
    else {
        return Ok(argv);
    };
    // A flag on the command line also displaces its mutually exclusive
    // partners from the file.
    const EXCLUSIVE: [&[&str]; 1] = [&["beta", "beta-log"]];
    let given = |key: &str| {
        argv[sub + 1..]
            .iter()
            .any(|a| a == &format!("--{key}") || a.starts_with(&format!("--{key}=")))
    };
    let displaced = |key: &str| {
        EXCLUSIVE
            .iter()
            .any(|group| group.contains(&key) && group.iter().any(|g| given(g)))
    };
    let mut injected = Vec::new();
    for (k, v) in read_config(&path)? {
        if displaced(&k) {
            continue;
        }
        match v.as_str() {
            "true" => injected.push(format!("--{k}")),
            "false" => {}
            _ => injected.push(format!("--{k}={v}")),
        }
    }
    let mut out = argv[..=sub].to_vec();
    out.extend(injected);
    out.extend_from_slice(&argv[sub + 1..]);
    Ok(out)
}
