use std::path::PathBuf;
use std::str::FromStr;

use bellsym_core::BellState;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{CliError, CliResult};

/// Two-qubit dephasing, Kraus decompositions and Bell-state exchange symmetry.
#[derive(Debug, Parser)]
#[command(name = "bellsym", version)]
pub struct Cli {
    /// Seed for every stochastic step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output format. Time series default to csv, reports to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density matrix of a Bell state under classical dephasing over a time grid.
    Evolve(EvolveArgs),
    /// Emit or check a Kraus set of the dephasing channel.
    Kraus(KrausArgs),
    /// Sample random mixers and histogram the symmetric-outcome probability.
    SymmetryScan(ScanArgs),
    /// Maximize the symmetric-outcome probability under a constraint pattern.
    Optimize(OptimizeArgs),
    /// Decoherence factor and reduced state of two central spins in spin baths.
    Spinbath(SpinbathArgs),
    /// Trajectory average over sampled classical noise.
    Montecarlo(MonteCarloArgs),
}

#[derive(Debug, Args)]
pub struct TimeGrid {
    /// Last time point of an evenly spaced grid starting at 0.
    #[arg(long)]
    pub t_max: Option<f64>,

    /// Number of grid points.
    #[arg(long)]
    pub points: Option<usize>,

    /// Explicit comma-separated times; overrides the grid.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub times: Vec<f64>,
}

impl TimeGrid {
    pub fn resolve(&self, default_t_max: f64, default_points: usize) -> CliResult<Vec<f64>> {
        if !self.times.is_empty() {
            if let Some(t) = self.times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
                return Err(CliError::Usage(format!("time {t} must be finite and >= 0")));
            }
            return Ok(self.times.clone());
        }
        let t_max = self.t_max.unwrap_or(default_t_max);
        let points = self.points.unwrap_or(default_points);
        if !(t_max.is_finite() && t_max >= 0.0) {
            return Err(CliError::Usage(format!(
                "--t-max {t_max} must be finite and >= 0"
            )));
        }
        match points {
            0 => Err(CliError::Usage("--points must be >= 1".into())),
            1 => Ok(vec![0.0]),
            n => Ok((0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect()),
        }
    }
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long, default_value = "B1")]
    pub state: BellState,

    /// Dephasing rate Γ of qubit A (and of B unless --rate-b is given).
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,

    /// Separate dephasing rate for qubit B.
    #[arg(long)]
    pub rate_b: Option<f64>,

    #[command(flatten)]
    pub grid: TimeGrid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KrausSource {
    /// Diagonal operators built from γ directly.
    Canonical,
    /// Eigendecomposition of the Choi matrix.
    Choi,
    /// Canonical set mixed by a seeded Haar-random unitary.
    Mixed,
}

#[derive(Debug, Args)]
pub struct KrausArgs {
    /// Decay factor γ in [0, 1]. Alternative to --rate with --time.
    #[arg(long, conflicts_with_all = ["rate", "time"])]
    pub gamma: Option<f64>,

    #[arg(long, requires = "time")]
    pub rate: Option<f64>,

    #[arg(long, requires = "rate")]
    pub time: Option<f64>,

    #[arg(long, value_enum, default_value_t = KrausSource::Canonical)]
    pub source: KrausSource,

    /// Check a Kraus set document instead of emitting one.
    #[arg(long, conflicts_with_all = ["gamma", "rate", "time", "source"])]
    pub check: Option<PathBuf>,
}

/// 1-based rows of the mixer whose second entry must vanish.
#[derive(Debug, Args)]
pub struct PatternArg {
    /// Comma-separated rows from 1..=4, at most three.
    #[arg(long, value_delimiter = ',')]
    pub pattern: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, default_value = "B3")]
    pub state: BellState,

    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,

    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,

    #[command(flatten)]
    pub pattern: PatternArg,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long, default_value = "B3")]
    pub state: BellState,

    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,

    #[command(flatten)]
    pub pattern: PatternArg,

    /// Total objective evaluations.
    #[arg(long, default_value_t = 60_000)]
    pub budget: usize,

    #[arg(long, default_value_t = 12)]
    pub restarts: usize,

    /// Random feasible mixers drawn for the cross-check.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,

    /// Largest allowed excess of the optimum over the sampled maximum.
    #[arg(long, default_value_t = crate::commands::DEFAULT_AGREEMENT_TOL)]
    pub agreement_tol: f64,
}

#[derive(Debug, Args)]
pub struct SpinbathArgs {
    /// Bath JSON file for qubit A. Without it a random bath is drawn.
    #[arg(long)]
    pub bath: Option<PathBuf>,

    /// Bath JSON file for qubit B. Defaults to a copy of bath A.
    #[arg(long)]
    pub bath_b: Option<PathBuf>,

    /// Spins in a generated bath.
    #[arg(long, default_value_t = 20, conflicts_with = "bath")]
    pub n_spins: usize,

    /// Generated spins start with |α| = |β| = 1/√2.
    #[arg(long, conflicts_with = "bath")]
    pub equal_amplitudes: bool,

    /// Draw an independent random bath for qubit B, seeded with seed + 1.
    #[arg(long, conflicts_with = "bath_b")]
    pub distinct: bool,

    #[arg(long, default_value_t = 0.0)]
    pub omega_min: f64,

    #[arg(long, default_value_t = 1.0)]
    pub omega_max: f64,

    /// Also emit the reduced density matrix for this initial Bell state.
    #[arg(long)]
    pub state: Option<BellState>,

    /// Save the bath used for qubit A as JSON.
    #[arg(long)]
    pub save_bath: Option<PathBuf>,

    #[command(flatten)]
    pub grid: TimeGrid,
}

/// Initial state for the trajectory simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialState {
    Bell(BellState),
    /// `|++⟩`, which has every coherence nonzero.
    PlusPlus,
}

impl FromStr for InitialState {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "plus" | "++" | "plusplus" => Ok(InitialState::PlusPlus),
            _ => s
                .parse::<BellState>()
                .map(InitialState::Bell)
                .map_err(|_| format!("unknown state '{s}', expected B1..B4 or plus")),
        }
    }
}

impl std::fmt::Display for InitialState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitialState::Bell(b) => write!(f, "{b}"),
            InitialState::PlusPlus => write!(f, "plus"),
        }
    }
}

#[derive(Debug, Args)]
pub struct MonteCarloArgs {
    /// B1..B4 or `plus` for |++⟩.
    #[arg(long, default_value = "plus")]
    pub state: InitialState,

    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,

    #[arg(long)]
    pub rate_b: Option<f64>,

    #[arg(long, default_value_t = 1.0)]
    pub time: f64,

    #[arg(long, default_value_t = 100_000)]
    pub trajectories: usize,

    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
}
