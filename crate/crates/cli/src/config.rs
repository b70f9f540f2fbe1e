//! Command-line interface and configuration-file handling.
//!
//! Every numeric option can also come from a `key = value` config file
//! (`--config FILE`); explicit flags win over the file, the file wins over
//! built-in defaults.

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SGQC_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "sgqc",
    version,
    about = "Chaos diagnostics for a disordered qubit lattice with residual couplings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Density of register-state energies over all magnetization bands (J = 0).
    Spectrum(SpectrumArgs),
    /// Level-spacing statistics P(s) and the crossover parameter eta.
    Pstats(GridArgs),
    /// Eigenstate entropy S_q averaged over the central window.
    Entropy(GridArgs),
    /// Local density of states with Breit-Wigner and Gaussian width fits.
    Ldos(GridArgs),
    /// Ensemble-averaged fidelity decay F(t), entropy growth S(t) and tau_chi.
    Evolve(EvolveArgs),
    /// Eigenstate or time-evolution weight maps of one disorder realization.
    Map(MapArgs),
    /// Full (n, J/delta) grid sweep with checkpointing.
    Sweep(SweepArgs),
    /// Chaos border J_c (eta = 0.3) and mixing border J_cs (S_q = 1) vs n.
    Border(BorderArgs),
}

/// Options shared by every subcommand.
#[derive(Args, Clone)]
pub struct CommonArgs {
    /// Qubit count (lattice geometry: most-square factorization).
    #[arg(long)]
    pub n: Option<usize>,
    /// Explicit lattice rows (with --cols, overrides the factorization).
    #[arg(long)]
    pub rows: Option<usize>,
    /// Explicit lattice columns.
    #[arg(long)]
    pub cols: Option<usize>,
    /// Number of disorder realizations.
    #[arg(long)]
    pub nd: Option<usize>,
    /// Master seed; everything downstream is reproducible from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fraction of the band kept on each side of the center.
    #[arg(long)]
    pub window_fraction: Option<f64>,
    /// Histogram bins.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Output directory (default: $SGQC_OUT_DIR, then the working directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Config file with `key = value` lines; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Detuning width over the one-qubit spacing, delta/Delta0.
    #[arg(long, default_value_t = 0.1)]
    pub delta_ratio: f64,
}

#[derive(Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Coupling values J/delta; repeatable or comma-separated.
    #[arg(long = "j-over-delta", value_delimiter = ',', num_args = 1..)]
    pub j_over_delta: Vec<f64>,
    /// Use the delta = 0 branch (energies in units of J).
    #[arg(long)]
    pub delta_zero: bool,
}

#[derive(Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long = "j-over-delta", value_delimiter = ',', num_args = 1..)]
    pub j_over_delta: Vec<f64>,
    /// End of the time grid in units of 1/delta (default: auto from Gamma).
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long, default_value_t = 150)]
    pub tsteps: usize,
    /// Random band initial states per realization.
    #[arg(long, default_value_t = 20)]
    pub states: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapKind {
    /// Eigenstate weights W_im over the central register states.
    Register,
    /// Spreading |chi_i(t)|^2 of a two-state superposition.
    Explosion,
}

#[derive(Args)]
pub struct MapArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value = "register")]
    pub map_kind: MapKind,
    #[arg(long, default_value_t = 0.2)]
    pub j_over_delta: f64,
    /// Matrix size (central states kept on each axis).
    #[arg(long, default_value_t = 60)]
    pub count: usize,
    #[arg(long, default_value_t = 20.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 100)]
    pub tsteps: usize,
}

#[derive(Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Qubit counts; repeatable or comma-separated.
    #[arg(long = "qubits", value_delimiter = ',', num_args = 1..)]
    pub qubits: Vec<usize>,
    #[arg(long = "j-over-delta", value_delimiter = ',', num_args = 1..)]
    pub j_over_delta: Vec<f64>,
    /// Comma list of analyses: eta, sq, ldos, evolve.
    #[arg(long, default_value = "eta,sq")]
    pub analyses: String,
    /// Checkpoint file; an interrupted sweep resumes from it.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub decay_states: usize,
    /// Refuse eigenvector analyses above this band dimension.
    #[arg(long, default_value_t = crate::ensemble::DEFAULT_VECTOR_CAP)]
    pub vector_cap: usize,
    #[arg(long)]
    pub delta_zero: bool,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long, default_value_t = 150)]
    pub tsteps: usize,
}

#[derive(Args)]
pub struct BorderArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long = "qubits", value_delimiter = ',', num_args = 1..)]
    pub qubits: Vec<usize>,
    #[arg(long = "j-over-delta", value_delimiter = ',', num_args = 1..)]
    pub j_over_delta: Vec<f64>,
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
}

/// Common options with the config file and defaults folded in.
pub struct Resolved {
    pub n: usize,
    pub rows: usize,
    pub cols: usize,
    pub nd: usize,
    pub seed: u64,
    pub window_fraction: f64,
    pub bins: usize,
    pub out: PathBuf,
}

fn parse_config(path: &PathBuf) -> Result<HashMap<String, String>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}:{}: expected key = value", path.display(), lineno + 1))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn pick<T: FromStr + Copy>(
    flag: Option<T>,
    file: &HashMap<String, String>,
    key: &str,
    default: T,
) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    if let Some(v) = flag {
        return Ok(v);
    }
    match file.get(key) {
        Some(s) => s.parse().map_err(|e| anyhow!("config key '{key}': {e}")),
        None => Ok(default),
    }
}

impl CommonArgs {
    /// For subcommands taking `--qubits` lists, where `--n` is irrelevant.
    pub fn resolve_allow_missing_n(&self) -> Result<Resolved> {
        if self.n.is_some() || self.rows.is_some() || self.cols.is_some() {
            return self.resolve();
        }
        let mut with_n = self.clone();
        with_n.n = Some(2);
        let mut r = with_n.resolve()?;
        r.n = 0;
        r.rows = 0;
        r.cols = 0;
        Ok(r)
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let file = match &self.config {
            Some(path) => parse_config(path)?,
            None => HashMap::new(),
        };
        let n = pick(self.n, &file, "n", 0)?;
        let (rows, cols) = match (
            pick(self.rows, &file, "rows", 0)?,
            pick(self.cols, &file, "cols", 0)?,
        ) {
            (0, 0) => {
                if n == 0 {
                    bail!("qubit count missing: pass --n (or rows/cols)");
                }
                let l = sgqc_core::lattice::LatticeSpec::squarest(n)
                    .map_err(|e| anyhow!("{e}"))?;
                (l.rows, l.cols)
            }
            (r, c) if r > 0 && c > 0 => {
                if n != 0 && n != r * c {
                    bail!("--n {n} contradicts --rows {r} --cols {c}");
                }
                (r, c)
            }
            _ => bail!("--rows and --cols must be given together"),
        };
        let out = self
            .out
            .clone()
            .or_else(|| file.get("out").map(PathBuf::from))
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(Resolved {
            n: rows * cols,
            rows,
            cols,
            nd: pick(self.nd, &file, "nd", 10)?,
            seed: pick(self.seed, &file, "seed", 2024)?,
            window_fraction: pick(
                self.window_fraction,
                &file,
                "window_fraction",
                sgqc_core::spectra::DEFAULT_WINDOW_FRACTION,
            )?,
            bins: pick(self.bins, &file, "bins", sgqc_core::spectra::DEFAULT_BINS)?,
            out,
        })
    }
}
