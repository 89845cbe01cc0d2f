//! Run configuration: an optional JSON file merged with command-line flags.
//! Flags win over file values; anything left unset falls back to a default
//! derived from the state.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use landau_core::grid::GridSpec;
use landau_core::oracle::PropagatorConfig;
use landau_core::states::{required_levels, StateKind, StateSpec};
use landau_core::{ChargeSign, FockTruncation, PhysicalParams};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Phases of one cyclotron period
    Phase,
    /// Center orbit samples and circle fit
    Trajectory,
    /// Grid wavefunction of the initial state
    Wavefunction,
    /// Fock-space result against the split-step grid propagator
    Validate,
    /// Full property suite
    Suite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    #[default]
    Natural,
    Physical,
}

#[derive(Debug, Clone, Default, PartialEq, Parser)]
#[command(
    name = "landau-phase",
    version,
    about = "Geometric phase and orbit of a charged wave packet in a uniform magnetic field"
)]
pub struct Flags {
    /// Command to run; may instead be given in the config file
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// JSON config file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// State spec as JSON, e.g. '{"kind":"coherent","alpha":[1,0]}'
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long = "nmax-a")]
    pub nmax_a: Option<usize>,
    #[arg(long = "nmax-b")]
    pub nmax_b: Option<usize>,
    /// Charge sign, +1 or -1
    #[arg(long, allow_hyphen_values = true, value_parser = parse_epsilon)]
    pub epsilon: Option<ChargeSign>,
    /// Cyclotron frequency
    #[arg(long = "omega-b")]
    pub omega_b: Option<f64>,
    /// Grid points as <nx>x<ny>
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,
    /// Half-width of the grid in both directions
    #[arg(long)]
    pub extent: Option<f64>,
    /// Propagator steps per period
    #[arg(long)]
    pub steps: Option<usize>,
    /// Output path (file, or file stem for multi-file commands)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Seed for random states
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub units: Option<Units>,
    /// Trajectory sample count
    #[arg(long)]
    pub samples: Option<usize>,
    /// Dump the propagated field every k steps (validate)
    #[arg(long = "dump-every")]
    pub dump_every: Option<usize>,
}

/// Everything a config file may set. Same names as the flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<Command>,
    pub state: Option<StateSpec>,
    pub nmax_a: Option<usize>,
    pub nmax_b: Option<usize>,
    pub epsilon: Option<ChargeSign>,
    pub omega_b: Option<f64>,
    pub flux_unit: Option<f64>,
    pub grid: Option<[usize; 2]>,
    pub extent: Option<f64>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub units: Option<Units>,
    pub samples: Option<usize>,
    pub dump_every: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub state: StateSpec,
    pub params: PhysicalParams,
    pub trunc: FockTruncation,
    pub grid: GridSpec,
    pub n_steps: usize,
    pub samples: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub units: Units,
    pub dump_every: Option<usize>,
}

pub const DEFAULT_SAMPLES: usize = 65;

fn parse_epsilon(s: &str) -> Result<ChargeSign, String> {
    match s.trim() {
        "+1" | "1" => Ok(ChargeSign::Positive),
        "-1" => Ok(ChargeSign::Negative),
        other => Err(format!("expected +1 or -1, got {other:?}")),
    }
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected <nx>x<ny>, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

pub fn load_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Levels each mode must hold for `spec`, before any margin.
fn levels_needed(spec: &StateSpec) -> (usize, usize) {
    let (a, b) = match &spec.kind {
        StateKind::Number { n, n_prime } => (*n, *n_prime),
        StateKind::Superposition { terms } => terms
            .iter()
            .fold((0, 0), |(a, b), t| (a.max(t.0), b.max(t.1))),
        StateKind::DisplacedNumber { n, alpha } => (required_levels(*n, *alpha).ceil() as usize, 0),
        StateKind::Coherent { alpha } => (required_levels(0, *alpha).ceil() as usize, 0),
        StateKind::Random { n_max, .. } => (*n_max, *n_max),
    };
    let b = match spec.b_shift {
        Some(beta) => required_levels(b, beta).ceil() as usize,
        None => b,
    };
    (a, b)
}

/// Smallest truncation that keeps two empty top levels in mode a.
pub fn default_truncation(spec: &StateSpec) -> FockTruncation {
    let (a, b) = levels_needed(spec);
    FockTruncation {
        n_max_a: (a + 2).max(4),
        n_max_b: b,
    }
}

impl RunConfig {
    /// Merges flags over the file (if any) over defaults.
    pub fn resolve(flags: &Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(p) => load_file(p)?,
            None => FileConfig::default(),
        };
        Self::merge(flags, file)
    }

    pub fn merge(flags: &Flags, file: FileConfig) -> Result<Self, CliError> {
        let command = flags.command.or(file.command).ok_or_else(|| {
            CliError::Config(
                "no command given (phase, trajectory, wavefunction, validate, suite)".into(),
            )
        })?;

        let mut state = match &flags.state {
            Some(s) => {
                serde_json::from_str(s).map_err(|e| CliError::Config(format!("--state: {e}")))?
            }
            None => file
                .state
                .unwrap_or_else(|| StateSpec::coherent(C64::new(1.0, 0.0))),
        };
        if let Some(seed) = flags.seed.or(file.seed) {
            match &mut state.kind {
                StateKind::Random { seed: s, .. } => *s = seed,
                _ => {
                    return Err(CliError::Config(
                        "--seed applies only to random states".into(),
                    ))
                }
            }
        }

        let mut params = PhysicalParams::default();
        if let Some(e) = flags.epsilon.or(file.epsilon) {
            params.epsilon = e;
        }
        if let Some(w) = flags.omega_b.or(file.omega_b) {
            params.omega_b = w;
        }
        if let Some(f) = file.flux_unit {
            params.flux_unit = f;
        }
        params.validate()?;

        let auto = default_truncation(&state);
        let trunc = FockTruncation::new(
            flags.nmax_a.or(file.nmax_a).unwrap_or(auto.n_max_a),
            flags.nmax_b.or(file.nmax_b).unwrap_or(auto.n_max_b),
        )?;

        let base = match command {
            Command::Validate => PropagatorConfig::default_for(&params),
            _ => PropagatorConfig {
                grid: GridSpec::default_for(&params),
                n_steps: 2048,
            },
        };
        let (nx, ny) = flags
            .grid
            .or(file.grid.map(|[a, b]| (a, b)))
            .unwrap_or((base.grid.nx, base.grid.ny));
        let extent = flags.extent.or(file.extent);
        let grid = GridSpec::new(
            nx,
            ny,
            extent.unwrap_or(base.grid.x_extent),
            extent.unwrap_or(base.grid.y_extent),
        )?;
        let n_steps = flags.steps.or(file.steps).unwrap_or(base.n_steps);
        if command == Command::Validate {
            PropagatorConfig::new(grid, n_steps)?;
        }

        let samples = flags.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES);
        if samples < 4 {
            return Err(CliError::Config(format!(
                "need at least 4 trajectory samples, got {samples}"
            )));
        }
        let dump_every = flags.dump_every.or(file.dump_every);
        if dump_every == Some(0) {
            return Err(CliError::Config("--dump-every must be positive".into()));
        }

        let out = flags.out.clone().or(file.out);
        if let Some(dir) = out
            .as_ref()
            .and_then(|p| p.parent())
            .filter(|d| !d.as_os_str().is_empty())
        {
            if !dir.is_dir() {
                return Err(CliError::Config(format!(
                    "output directory {} does not exist",
                    dir.display()
                )));
            }
        }

        Ok(RunConfig {
            command,
            state,
            params,
            trunc,
            grid,
            n_steps,
            samples,
            out,
            format: flags.format.or(file.format).unwrap_or_default(),
            units: flags.units.or(file.units).unwrap_or_default(),
            dump_every,
        })
    }

    pub fn propagator(&self) -> Result<PropagatorConfig, CliError> {
        Ok(PropagatorConfig::new(self.grid, self.n_steps)?)
    }
}
