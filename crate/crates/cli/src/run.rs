//! Command dispatch and report output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use landau_core::dynamics::{phase_report, PhaseReport};
use landau_core::grid::{GridField, BOUNDARY_DENSITY_LIMIT};
use landau_core::oracle::{cross_validate_with, ValidationTolerances};
use landau_core::realspace::{BasisRoute, FockGridBasis};
use landau_core::states::make_state;
use landau_core::trajectory::{center_trajectory, fit_circle, CircleFit, TrajectorySample};
use serde::Serialize;

use crate::config::{Command, Format, RunConfig, Units};
use crate::suite::run_suite;
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct PhaseOutput {
    #[serde(flatten)]
    pub report: PhaseReport,
    /// Enclosed flux; in units of `hbar c / |q|` (natural) or scaled by `flux_unit` (physical).
    pub flux: f64,
    pub units: Units,
}

impl PhaseOutput {
    pub fn new(report: PhaseReport, cfg: &RunConfig) -> Self {
        let natural = cfg.params.eps() * report.reduced_flux;
        let flux = match cfg.units {
            Units::Natural => natural,
            Units::Physical => natural * cfg.params.flux_unit,
        };
        // adding 0.0 turns -0.0 into 0.0 for stable text output
        PhaseOutput {
            report,
            flux: flux + 0.0,
            units: cfg.units,
        }
    }

    fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let r = &self.report;
        writeln!(
            out,
            "total_phase,dynamic_phase,geometric_phase,mean_n,mean_a_re,mean_a_im,delta_a_sq,reduced_flux,flux_residual,flux"
        )?;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.total_phase,
            r.dynamic_phase,
            r.geometric_phase,
            r.mean_n,
            r.mean_a.re,
            r.mean_a.im,
            r.delta_a_sq,
            r.reduced_flux,
            r.flux_residual,
            self.flux
        )
    }
}

#[derive(Debug, Clone, Serialize)]
struct TrajectoryOutput<'a> {
    fit: &'a CircleFit,
    max_discrepancy: Option<f64>,
    samples: &'a [TrajectorySample],
}

#[derive(Debug, Clone, Serialize)]
struct WavefunctionSummary {
    nx: usize,
    ny: usize,
    x_extent: f64,
    y_extent: f64,
    norm: f64,
    boundary_density: f64,
    center: [f64; 2],
    lpgf: PathBuf,
    density_csv: PathBuf,
}

/// Runs `cfg` and returns the process exit code.
pub fn run(cfg: &RunConfig) -> i32 {
    match dispatch(cfg) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Like [`run`] but with the error kept for the caller. `Ok` carries 0 or 1.
pub fn dispatch(cfg: &RunConfig) -> Result<i32, CliError> {
    match cfg.command {
        Command::Phase => phase(cfg),
        Command::Trajectory => trajectory(cfg),
        Command::Wavefunction => wavefunction(cfg),
        Command::Validate => validate(cfg),
        Command::Suite => Ok(if run_suite(&mut std::io::stdout().lock())? {
            0
        } else {
            1
        }),
    }
}

fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

/// Writes to `--out` when given, otherwise stdout.
fn emit(
    cfg: &RunConfig,
    write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => {
            let mut f = create(path)?;
            write(&mut f)?;
            f.flush()?;
        }
        None => {
            let mut lock = std::io::stdout().lock();
            write(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

fn require_json(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.format != Format::Json {
        return Err(CliError::Config(
            format!("{:?} output is JSON only", cfg.command).to_lowercase(),
        ));
    }
    Ok(())
}

fn phase(cfg: &RunConfig) -> Result<i32, CliError> {
    let state = make_state(&cfg.state, cfg.trunc)?;
    let output = PhaseOutput::new(phase_report(&state, &cfg.params)?, cfg);
    emit(cfg, |w| match cfg.format {
        Format::Json => write_json(w, &output),
        Format::Csv => output.write_csv(w),
    })?;
    Ok(0)
}

fn trajectory(cfg: &RunConfig) -> Result<i32, CliError> {
    let state = make_state(&cfg.state, cfg.trunc)?;
    let traj = center_trajectory(&state, &cfg.params, cfg.samples)?;
    let fit = fit_circle(&traj)?;
    match &cfg.out {
        Some(stem) => {
            let mut csv = create(&with_suffix(stem, ".csv"))?;
            traj.write_csv(&mut csv)?;
            csv.flush()?;
            let mut json = create(&with_suffix(stem, ".fit.json"))?;
            write_json(&mut json, &fit)?;
            json.flush()?;
        }
        None => emit(cfg, |w| match cfg.format {
            Format::Csv => traj.write_csv(w),
            Format::Json => write_json(
                w,
                &TrajectoryOutput {
                    fit: &fit,
                    max_discrepancy: traj.max_discrepancy,
                    samples: &traj.samples,
                },
            ),
        })?,
    }
    Ok(0)
}

fn wavefunction(cfg: &RunConfig) -> Result<i32, CliError> {
    require_json(cfg)?;
    let stem = cfg.out.as_ref().ok_or_else(|| {
        CliError::Config(
            "wavefunction needs --out <stem> for the .lpgf and .density.csv files".into(),
        )
    })?;
    let state = make_state(&cfg.state, cfg.trunc)?;
    let basis =
        FockGridBasis::build_with(cfg.trunc, cfg.grid, &cfg.params, BasisRoute::ClosedForm)?;
    let field = basis.synthesize(&state)?;
    field.check_boundary(BOUNDARY_DENSITY_LIMIT)?;

    let lpgf = with_suffix(stem, ".lpgf");
    let density_csv = with_suffix(stem, ".density.csv");
    let mut f = create(&lpgf)?;
    field.write_lpgf(&mut f)?;
    f.flush()?;
    let mut f = create(&density_csv)?;
    field.write_density_csv(&mut f)?;
    f.flush()?;

    let (cx, cy) = field.center();
    let summary = WavefunctionSummary {
        nx: cfg.grid.nx,
        ny: cfg.grid.ny,
        x_extent: cfg.grid.x_extent,
        y_extent: cfg.grid.y_extent,
        norm: field.norm_sqr(),
        boundary_density: field.boundary_density() / field.norm_sqr(),
        center: [cx, cy],
        lpgf,
        density_csv,
    };
    write_json(&mut std::io::stdout().lock(), &summary)?;
    Ok(0)
}

fn dump_path(stem: &Path, step: usize) -> PathBuf {
    with_suffix(stem, &format!(".step{step:06}.lpgf"))
}

fn validate(cfg: &RunConfig) -> Result<i32, CliError> {
    require_json(cfg)?;
    let config = cfg.propagator()?;
    let dump = match (cfg.dump_every, &cfg.out) {
        (Some(k), Some(stem)) => Some((k, stem.clone())),
        (Some(_), None) => return Err(CliError::Config("--dump-every needs --out <stem>".into())),
        _ => None,
    };
    let observer = |step: usize, field: &GridField| -> landau_core::Result<()> {
        if let Some((k, stem)) = &dump {
            if step.is_multiple_of(*k) {
                let mut f = BufWriter::new(File::create(dump_path(stem, step))?);
                field.write_lpgf(&mut f)?;
                f.flush()?;
            }
        }
        Ok(())
    };
    let report = cross_validate_with(
        &cfg.state,
        &config,
        &cfg.params,
        cfg.trunc,
        ValidationTolerances::default(),
        observer,
    )?;
    emit(cfg, |w| write_json(w, &report))?;
    Ok(if report.passed { 0 } else { 1 })
}
