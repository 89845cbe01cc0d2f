//! Independent real-space propagator for the symmetric-gauge Hamiltonian
//!
//! `H = p^2/2M + M w^2 r^2/8 - (eps w/2) x p_y + (eps w/2) y p_x`.
//!
//! Each of the four terms is diagonal in some mix of position and momentum
//! representation (full k-space; real space; `(x, k_y)`; `(k_x, y)`), so a
//! second-order symmetric splitting is a sequence of pure phase
//! multiplications between axis-wise FFTs. Nothing here uses the ladder
//! operator solution.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::angle::{circular_distance, wrap};
use crate::dynamics::{evolve, phase_report};
use crate::error::{Error, Result};
use crate::fft::{wavenumbers, Fft2};
use crate::fock::Mode;
use crate::grid::{GridField, GridSpec, BOUNDARY_DENSITY_LIMIT};
use crate::params::{FockTruncation, PhysicalParams, HBAR, MASS};
use crate::realspace::{BasisRoute, FockGridBasis};
use crate::states::{ladder_mean, make_state, StateSpec};
use crate::trajectory::{
    closed_form_center, fit_circle_points, CircleFit, Trajectory, TrajectorySample,
};

/// Trajectory samples per cycle.
pub const TRAJECTORY_SAMPLES: usize = 64;

/// Smallest accepted `|<psi(0)|psi(T)>|`; the exact value is 1.
pub const MIN_CYCLE_OVERLAP: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagatorConfig {
    pub grid: GridSpec,
    /// Steps per cyclotron period; `dt = T / n_steps`.
    pub n_steps: usize,
}

impl PropagatorConfig {
    pub fn new(grid: GridSpec, n_steps: usize) -> Result<Self> {
        let c = PropagatorConfig { grid, n_steps };
        c.validate()?;
        Ok(c)
    }

    /// 128 x 128 points on `+-8` magnetic lengths, 2048 steps.
    pub fn default_for(params: &PhysicalParams) -> Self {
        let e = 8.0 * params.magnetic_length();
        PropagatorConfig {
            grid: GridSpec {
                nx: 128,
                ny: 128,
                x_extent: e,
                y_extent: e,
            },
            n_steps: 2048,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.n_steps < 1024 || !self.n_steps.is_multiple_of(TRAJECTORY_SAMPLES) {
            return Err(Error::InvalidParams(format!(
                "n_steps must be a multiple of {TRAJECTORY_SAMPLES} and at least 1024, got {}",
                self.n_steps
            )));
        }
        Ok(())
    }

    pub fn dt(&self, params: &PhysicalParams) -> f64 {
        params.period() / self.n_steps as f64
    }
}

/// Precomputed phase factors for one Strang step.
pub struct SplitStepPropagator {
    grid: GridSpec,
    fft: Fft2,
    kinetic_half: Array2<C64>,
    trap_half: Array2<C64>,
    /// `(k_y, x)` layout: row `j` is `k_y[j]`, column `i` is `x[i]`.
    xpy_half: Array2<C64>,
    /// `(y, k_x)` layout.
    ypx_full: Array2<C64>,
    // symbols for energy evaluation
    kinetic: Array2<f64>,
    trap: Array2<f64>,
    xpy: Array2<f64>,
    ypx: Array2<f64>,
}

impl SplitStepPropagator {
    pub fn new(grid: GridSpec, dt: f64, params: &PhysicalParams) -> Self {
        let w = params.omega_b;
        let coupling = 0.5 * params.eps() * w;
        let kx = wavenumbers(grid.nx, grid.dx());
        let ky = wavenumbers(grid.ny, grid.dy());
        let xs = grid.xs();
        let ys = grid.ys();
        let shape = (grid.ny, grid.nx);

        let kinetic = Array2::from_shape_fn(shape, |(j, i)| {
            HBAR * HBAR * (kx[i] * kx[i] + ky[j] * ky[j]) / (2.0 * MASS)
        });
        let trap = Array2::from_shape_fn(shape, |(j, i)| {
            MASS * w * w * (xs[i] * xs[i] + ys[j] * ys[j]) / 8.0
        });
        // -(eps w / 2) x p_y and +(eps w / 2) y p_x with p = hbar k
        let xpy = Array2::from_shape_fn(shape, |(j, i)| -coupling * xs[i] * HBAR * ky[j]);
        let ypx = Array2::from_shape_fn(shape, |(j, i)| coupling * ys[j] * HBAR * kx[i]);

        let phase = |e: &Array2<f64>, tau: f64| e.mapv(|v| C64::from_polar(1.0, -v * tau / HBAR));
        SplitStepPropagator {
            grid,
            fft: Fft2::new(grid.nx, grid.ny),
            kinetic_half: phase(&kinetic, 0.5 * dt),
            trap_half: phase(&trap, 0.5 * dt),
            xpy_half: phase(&xpy, 0.5 * dt),
            ypx_full: phase(&ypx, dt),
            kinetic,
            trap,
            xpy,
            ypx,
        }
    }

    /// One step: half kinetic, half trap, half `x p_y`, full `y p_x`, then the mirror image.
    pub fn step(&self, values: &mut Array2<C64>) {
        self.apply_kinetic_half(values);
        *values *= &self.trap_half;
        self.apply_xpy_half(values);
        self.fft.forward_x(values);
        *values *= &self.ypx_full;
        self.fft.inverse_x(values);
        self.apply_xpy_half(values);
        *values *= &self.trap_half;
        self.apply_kinetic_half(values);
    }

    fn apply_kinetic_half(&self, values: &mut Array2<C64>) {
        self.fft.forward(values);
        *values *= &self.kinetic_half;
        self.fft.inverse(values);
    }

    fn apply_xpy_half(&self, values: &mut Array2<C64>) {
        self.fft.forward_y(values);
        *values *= &self.xpy_half;
        self.fft.inverse_y(values);
    }

    /// `<H>` with every term evaluated in its diagonal representation.
    pub fn energy(&self, values: &Array2<C64>) -> f64 {
        let weighted = |v: &Array2<C64>, sym: &Array2<f64>| {
            let (mut num, mut den) = (0.0, 0.0);
            for (z, s) in v.iter().zip(sym.iter()) {
                let d = z.norm_sqr();
                num += d * s;
                den += d;
            }
            num / den
        };
        let mut k = values.clone();
        self.fft.forward(&mut k);
        let mut ky_x = values.clone();
        self.fft.forward_y(&mut ky_x);
        let mut y_kx = values.clone();
        self.fft.forward_x(&mut y_kx);
        weighted(&k, &self.kinetic)
            + weighted(values, &self.trap)
            + weighted(&ky_x, &self.xpy)
            + weighted(&y_kx, &self.ypx)
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }
}

/// One Strang step of length `config.dt`.
pub fn strang_step(
    field: &GridField,
    config: &PropagatorConfig,
    params: &PhysicalParams,
) -> Result<GridField> {
    config.validate()?;
    field.check_boundary(BOUNDARY_DENSITY_LIMIT)?;
    let prop = SplitStepPropagator::new(config.grid, config.dt(params), params);
    let mut values = field.values.clone();
    prop.step(&mut values);
    let out = GridField {
        values,
        grid: field.grid,
    };
    out.check_boundary(BOUNDARY_DENSITY_LIMIT)?;
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct CycleResult {
    pub field_t: GridField,
    /// `arg <psi(0)|psi(T)>`, wrapped.
    pub total_phase: f64,
    /// `-(1/hbar)` times the trapezoidal integral of `<H>_t` sampled every step.
    pub dynamic_phase: f64,
    pub geometric_phase: f64,
    pub overlap_magnitude: f64,
    /// `|norm(T) - norm(0)|` relative to `norm(0)`.
    pub norm_drift: f64,
    /// Largest `|<H>_t - <H>_0| / |<H>_0|`.
    pub energy_drift: f64,
    pub trajectory: Trajectory,
}

/// Propagates over one period. `observer` sees every step index and field.
pub fn propagate_cycle_with<F>(
    field0: &GridField,
    config: &PropagatorConfig,
    params: &PhysicalParams,
    mut observer: F,
) -> Result<CycleResult>
where
    F: FnMut(usize, &GridField) -> Result<()>,
{
    config.validate()?;
    if field0.grid != config.grid {
        return Err(Error::InvalidParams(
            "initial field grid differs from propagator grid".into(),
        ));
    }
    field0.check_boundary(BOUNDARY_DENSITY_LIMIT)?;
    let dt = config.dt(params);
    let prop = SplitStepPropagator::new(config.grid, dt, params);
    let norm0 = field0.norm_sqr();
    let sample_every = config.n_steps / TRAJECTORY_SAMPLES;

    let mut field = field0.clone();
    let mut energies = Vec::with_capacity(config.n_steps + 1);
    let mut samples = Vec::with_capacity(TRAJECTORY_SAMPLES + 1);
    let push_sample = |samples: &mut Vec<TrajectorySample>, step: usize, f: &GridField| {
        let (x, y) = f.center();
        samples.push(TrajectorySample {
            t: step as f64 * dt,
            x,
            y,
            x_closed: None,
            y_closed: None,
        });
    };

    energies.push(prop.energy(&field.values));
    push_sample(&mut samples, 0, &field);
    observer(0, &field)?;
    for step in 1..=config.n_steps {
        prop.step(&mut field.values);
        field.check_boundary(BOUNDARY_DENSITY_LIMIT)?;
        energies.push(prop.energy(&field.values));
        if step % sample_every == 0 {
            push_sample(&mut samples, step, &field);
        }
        observer(step, &field)?;
    }

    let overlap = field0.inner(&field)? / norm0;
    let overlap_magnitude = overlap.norm();
    if overlap_magnitude < MIN_CYCLE_OVERLAP {
        return Err(Error::IntegratorFailure(format!(
            "cycle overlap magnitude {overlap_magnitude:.6} below {MIN_CYCLE_OVERLAP}"
        )));
    }
    let total_phase = wrap(overlap.arg());
    let interior: f64 = energies[1..config.n_steps].iter().sum();
    let integral = dt * (0.5 * (energies[0] + energies[config.n_steps]) + interior);
    let dynamic_phase = -integral / HBAR;
    let e0 = energies[0];
    let energy_drift = energies.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max)
        / e0.abs().max(f64::MIN_POSITIVE);

    Ok(CycleResult {
        norm_drift: (field.norm_sqr() - norm0).abs() / norm0,
        field_t: field,
        total_phase,
        dynamic_phase,
        geometric_phase: wrap(total_phase - dynamic_phase),
        overlap_magnitude,
        energy_drift,
        trajectory: Trajectory {
            samples,
            params: *params,
            max_discrepancy: None,
        },
    })
}

pub fn propagate_cycle(
    field0: &GridField,
    config: &PropagatorConfig,
    params: &PhysicalParams,
) -> Result<CycleResult> {
    propagate_cycle_with(field0, config, params, |_, _| Ok(()))
}

impl CycleResult {
    pub fn circle_fit(&self) -> Result<CircleFit> {
        let pts: Vec<_> = self
            .trajectory
            .samples
            .iter()
            .map(|s| (s.t, s.x, s.y))
            .collect();
        fit_circle_points(&pts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseComparison {
    pub analytic: f64,
    pub numeric: f64,
    pub discrepancy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationTolerances {
    pub phase: f64,
    pub trajectory: f64,
    pub infidelity: f64,
}

impl Default for ValidationTolerances {
    fn default() -> Self {
        ValidationTolerances {
            phase: 2e-2,
            trajectory: 1e-2,
            infidelity: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub spec: StateSpec,
    pub params: PhysicalParams,
    pub config: PropagatorConfig,
    pub total_phase: PhaseComparison,
    /// Unwrapped on both sides; discrepancy is the plain difference.
    pub dynamic_phase: PhaseComparison,
    pub geometric_phase: PhaseComparison,
    pub trajectory_max_deviation: f64,
    pub final_state_infidelity: f64,
    pub synthesis_captured_norm: f64,
    pub overlap_magnitude: f64,
    pub norm_drift: f64,
    pub energy_drift: f64,
    pub numeric_circle: CircleFit,
    pub tolerances: ValidationTolerances,
    pub passed: bool,
}

/// Runs the analytic Fock-space path and the grid propagator on the same
/// initial state and reports their disagreement.
pub fn cross_validate(
    spec: &StateSpec,
    config: &PropagatorConfig,
    params: &PhysicalParams,
    trunc: FockTruncation,
) -> Result<ValidationReport> {
    cross_validate_with(
        spec,
        config,
        params,
        trunc,
        ValidationTolerances::default(),
        |_, _| Ok(()),
    )
}

/// [`cross_validate`] with explicit tolerances; `observer` is handed to the propagator.
pub fn cross_validate_with<F>(
    spec: &StateSpec,
    config: &PropagatorConfig,
    params: &PhysicalParams,
    trunc: FockTruncation,
    tolerances: ValidationTolerances,
    observer: F,
) -> Result<ValidationReport>
where
    F: FnMut(usize, &GridField) -> Result<()>,
{
    config.validate()?;
    let state = make_state(spec, trunc)?;
    let analytic = phase_report(&state, params)?;

    let basis = FockGridBasis::build_with(trunc, config.grid, params, BasisRoute::ClosedForm)?;
    let raw0 = basis.synthesize(&state)?;
    let synthesis_captured_norm = raw0.norm_sqr();
    let field0 = raw0.normalized()?;
    let numeric = propagate_cycle_with(&field0, config, params, observer)?;

    let expected_t = basis
        .synthesize(&evolve(&state, params.period(), params))?
        .normalized()?;
    let final_overlap = expected_t.inner(&numeric.field_t)? / numeric.field_t.norm_sqr().sqrt();
    let final_state_infidelity = 1.0 - final_overlap.norm();

    let beta_a = ladder_mean(&state, Mode::A);
    let beta_b = ladder_mean(&state, Mode::B);
    let trajectory_max_deviation = numeric
        .trajectory
        .samples
        .iter()
        .map(|s| {
            let (x, y) = closed_form_center(beta_a, beta_b, params, s.t);
            (s.x - x).hypot(s.y - y)
        })
        .fold(0.0, f64::max);

    let total_phase = PhaseComparison {
        analytic: analytic.total_phase,
        numeric: numeric.total_phase,
        discrepancy: circular_distance(analytic.total_phase, numeric.total_phase),
    };
    let dynamic_phase = PhaseComparison {
        analytic: analytic.dynamic_phase,
        numeric: numeric.dynamic_phase,
        discrepancy: (analytic.dynamic_phase - numeric.dynamic_phase).abs(),
    };
    let geometric_phase = PhaseComparison {
        analytic: analytic.geometric_phase,
        numeric: numeric.geometric_phase,
        discrepancy: circular_distance(analytic.geometric_phase, numeric.geometric_phase),
    };
    let passed = total_phase.discrepancy <= tolerances.phase
        && dynamic_phase.discrepancy <= tolerances.phase
        && geometric_phase.discrepancy <= tolerances.phase
        && trajectory_max_deviation <= tolerances.trajectory
        && final_state_infidelity <= tolerances.infidelity;

    Ok(ValidationReport {
        spec: spec.clone(),
        params: *params,
        config: *config,
        total_phase,
        dynamic_phase,
        geometric_phase,
        trajectory_max_deviation,
        final_state_infidelity,
        synthesis_captured_norm,
        overlap_magnitude: numeric.overlap_magnitude,
        norm_drift: numeric.norm_drift,
        energy_drift: numeric.energy_drift,
        numeric_circle: numeric.circle_fit()?,
        tolerances,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realspace::ground_state;
    use crate::ChargeSign;

    fn config() -> PropagatorConfig {
        PropagatorConfig::default_for(&PhysicalParams::default())
    }

    #[test]
    fn config_validation() {
        let g = config().grid;
        assert!(PropagatorConfig::new(g, 2048).is_ok());
        assert!(PropagatorConfig::new(g, 512).is_err());
        assert!(PropagatorConfig::new(g, 2000).is_err());
        let p = PhysicalParams::new(ChargeSign::Positive, 3.0).unwrap();
        let c = PropagatorConfig::new(g, 4096).unwrap();
        assert!((c.dt(&p) * 4096.0 - p.period()).abs() < 1e-15);
    }

    #[test]
    fn one_step_preserves_norm() {
        let p = PhysicalParams::default();
        let f0 = crate::realspace::displace_wavefunction(
            &ground_state(config().grid, &p).unwrap(),
            C64::new(0.7, 0.4),
            &p,
        )
        .unwrap();
        let f1 = strang_step(&f0, &config(), &p).unwrap();
        assert!((f1.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ground_state_acquires_zero_point_phase() {
        for eps in [ChargeSign::Positive, ChargeSign::Negative] {
            let p = PhysicalParams::new(eps, 1.0).unwrap();
            let cfg = config();
            let f0 = ground_state(cfg.grid, &p).unwrap();
            let f1 = strang_step(&f0, &cfg, &p).unwrap();
            let phase = C64::from_polar(1.0, -0.5 * p.omega_b * cfg.dt(&p));
            let expected = GridField {
                values: f0.values.mapv(|z| z * phase),
                grid: f0.grid,
            };
            let d = f1.max_abs_diff(&expected);
            assert!(d < 1e-7, "{d}");
        }
    }

    #[test]
    fn zero_field_stays_zero() {
        let f0 = GridField::zeros(config().grid);
        let f1 = strang_step(&f0, &config(), &PhysicalParams::default()).unwrap();
        assert_eq!(f1.values.iter().map(|z| z.norm()).fold(0.0, f64::max), 0.0);
    }

    #[test]
    fn ground_energy_is_zero_point() {
        let p = PhysicalParams::new(ChargeSign::Negative, 2.0).unwrap();
        let g = GridSpec::square(128, 8.0 * p.magnetic_length()).unwrap();
        let prop = SplitStepPropagator::new(g, 0.01, &p);
        let e = prop.energy(&ground_state(g, &p).unwrap().values);
        assert!((e - 1.0).abs() < 1e-10, "{e}");
    }

    #[test]
    fn packet_near_edge_is_rejected() {
        let cfg = config();
        let f0 = GridField::from_fn(cfg.grid, |x, y| {
            C64::new((-(x - 7.8).powi(2) - y * y).exp(), 0.0)
        });
        assert!(matches!(
            strang_step(&f0, &cfg, &PhysicalParams::default()),
            Err(Error::BoundaryViolation { .. })
        ));
    }
}
