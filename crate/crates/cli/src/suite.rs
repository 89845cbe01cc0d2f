//! Property suite behind the `suite` command: every module invariant checked
//! against closed-form values, one table row per check.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::io::Write;
use std::time::Instant;

use landau_core::angle::{circular_distance, wrap};
use landau_core::dynamics::{phase_report, shape_preservation_check};
use landau_core::fock::*;
use landau_core::grid::GridSpec;
use landau_core::oracle::{propagate_cycle, PropagatorConfig};
use landau_core::realspace::*;
use landau_core::states::{displacement_matrix, ladder_mean, make_state, StateSpec};
use landau_core::trajectory::{center_trajectory, fit_circle, Handedness};
use landau_core::{ChargeSign, FockTruncation, PhysicalParams, Result};
use num_complex::Complex64 as C64;

pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Check = fn() -> Result<(bool, String)>;

pub const CHECKS: &[(&str, Check)] = &[
    ("cyclicity and total phase", cyclicity),
    ("geometric phase equals 2 pi <N>", geometric_identity),
    ("flux decomposition", flux_decomposition),
    ("displaced number family", displaced_family),
    ("center orbit circle", orbit_circle),
    ("shape preservation", shape_preservation),
    ("real-space consistency", realspace_consistency),
    ("grid propagator oracle", grid_oracle),
    ("operator identities", operator_identities),
    ("displacement unitarity", displacement_unitarity),
];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn random_reports() -> Result<Vec<landau_core::dynamics::PhaseReport>> {
    let t = FockTruncation::new(32, 8)?;
    let p = PhysicalParams::default();
    (0..100)
        .map(|seed| phase_report(&make_state(&StateSpec::random(seed, 30), t)?, &p))
        .collect()
}

fn cyclicity() -> Result<(bool, String)> {
    let t = FockTruncation::new(32, 8)?;
    let p = PhysicalParams::default();
    let (mut mag, mut phase) = (0.0f64, 0.0f64);
    for seed in 0..100 {
        let s = make_state(&StateSpec::random(seed, 30), t)?;
        let ov = s.inner(&landau_core::dynamics::evolve(&s, p.period(), &p))?;
        mag = mag.max((ov.norm() - 1.0).abs());
        phase = phase.max(circular_distance(wrap(ov.arg()), PI));
    }
    Ok((
        mag <= 1e-12 && phase <= 1e-12,
        format!("max ||<0|T>|-1| {mag:.1e}, max |delta-pi| {phase:.1e}"),
    ))
}

fn geometric_identity() -> Result<(bool, String)> {
    let gap = random_reports()?
        .iter()
        .map(|r| r.number_identity_gap())
        .fold(0.0, f64::max);
    Ok((gap <= 1e-9, format!("max gap {gap:.1e}")))
}

fn flux_decomposition() -> Result<(bool, String)> {
    let worst = random_reports()?
        .iter()
        .map(|r| r.flux_residual.abs())
        .fold(0.0, f64::max);
    let t = FockTruncation::new(3, 0)?;
    let s = make_state(
        &StateSpec::superposition(vec![(0, 0, c(1.0, 0.0)), (1, 0, c(1.0, 0.0))]),
        t,
    )?;
    let r = phase_report(&s, &PhysicalParams::default())?;
    let hand = circular_distance(r.geometric_phase, PI)
        .max((r.reduced_flux + PI / 2.0).abs())
        .max((r.delta_a_sq - 0.25).abs());
    Ok((
        worst <= 1e-9 && hand <= 1e-10,
        format!("max residual {worst:.1e}, two-level triple {hand:.1e}"),
    ))
}

fn displaced_family() -> Result<(bool, String)> {
    let t = FockTruncation::new(96, 0)?;
    let p = PhysicalParams::default();
    let alphas = [
        c(0.5, 0.0),
        c(1.0, 0.0),
        c(1.0, 1.0),
        C64::from_polar(2.0, PI / 3.0),
    ];
    let mut worst = 0.0f64;
    for n in 0..=5 {
        for &alpha in &alphas {
            let r = phase_report(&make_state(&StateSpec::displaced_number(n, alpha), t)?, &p)?;
            worst = worst
                .max((r.mean_a - alpha).norm())
                .max((r.delta_a_sq - n as f64).abs())
                .max(circular_distance(
                    r.geometric_phase,
                    wrap(TAU * alpha.norm_sqr()),
                ));
        }
    }
    Ok((worst <= 1e-8, format!("max error {worst:.1e}")))
}

fn orbit_circle() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    let mut handed = true;
    let cases = [
        (StateSpec::coherent(c(2.0, 0.0)), None),
        (StateSpec::displaced_number(1, c(0.7, -0.4)), None),
        (StateSpec::coherent(c(0.5, 1.0)), Some(c(0.4, -0.3))),
        (
            StateSpec::displaced_number(2, c(-1.0, 0.5)),
            Some(c(-0.2, 0.6)),
        ),
    ];
    for (spec, shift) in cases {
        let spec = match shift {
            Some(beta) => spec.with_b_shift(beta),
            None => spec,
        };
        for eps in [ChargeSign::Positive, ChargeSign::Negative] {
            let p = PhysicalParams::new(eps, 1.0)?;
            let s = make_state(
                &spec,
                FockTruncation::new(60, if shift.is_some() { 24 } else { 0 })?,
            )?;
            let (ba, bb) = (ladder_mean(&s, Mode::A), ladder_mean(&s, Mode::B));
            let fit = fit_circle(&center_trajectory(&s, &p, 65)?)?;
            let scale = p.orbit_scale();
            worst = worst
                .max((fit.radius - SQRT_2 * ba.norm()).abs())
                .max((fit.center[0] - scale * bb.re).abs())
                .max((fit.center[1] + p.eps() * scale * bb.im).abs())
                .max((fit.angular_frequency - p.omega_b).abs());
            let expected = if eps == ChargeSign::Positive {
                Handedness::Clockwise
            } else {
                Handedness::Anticlockwise
            };
            handed &= fit.handedness == expected;
        }
    }
    Ok((
        worst <= 1e-8 && handed,
        format!(
            "max error {worst:.1e}, handedness {}",
            if handed { "ok" } else { "wrong" }
        ),
    ))
}

fn shape_preservation() -> Result<(bool, String)> {
    let p = PhysicalParams::default();
    let t = FockTruncation::new(96, 0)?;
    let times: Vec<f64> = (0..16).map(|k| k as f64 * p.period() / 16.0).collect();
    let mut worst = 0.0f64;
    for (n, a) in [(0, 1.0), (1, 1.0), (2, 1.5)] {
        worst = worst.max(shape_preservation_check(n, c(a, 0.0), &p, t, &times)?);
    }
    Ok((worst <= 1e-8, format!("max infidelity {worst:.1e}")))
}

fn realspace_consistency() -> Result<(bool, String)> {
    let p = PhysicalParams::default();
    let g = GridSpec::square(256, 12.0)?;
    let ground = ground_state(g, &p)?;
    let residual = apply_ladder_grid(LadderOp::A, &ground, &p)?
        .values
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);

    let states = (0..=6)
        .map(|n| number_wavefunction(n, &HolomorphicPoly::one(), g, &p))
        .collect::<Result<Vec<_>>>()?;
    let mut gram = 0.0f64;
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            gram = gram.max((a.inner(b)? - c(target, 0.0)).norm());
        }
    }

    let alpha = c(1.0, 0.0);
    let proj = project_to_fock(
        &displace_wavefunction(&ground, alpha, &p)?,
        &p,
        FockTruncation::new(17, 0)?,
    )?;
    let mut coherent = 0.0f64;
    let mut factorial = 1.0;
    for n in 0..=17 {
        if n > 0 {
            factorial *= n as f64;
        }
        let expected = (-0.5 * alpha.norm_sqr()).exp() * alpha.powu(n as u32) / factorial.sqrt();
        coherent = coherent.max((proj.amplitudes[[n, 0]] - expected).norm());
    }
    Ok((
        residual <= 1e-8 && gram <= 1e-6 && coherent <= 1e-5,
        format!("a psi0 {residual:.1e}, gram {gram:.1e}, coherent amplitudes {coherent:.1e}"),
    ))
}

fn grid_oracle() -> Result<(bool, String)> {
    let p = PhysicalParams::default();
    let grid = PropagatorConfig::default_for(&p).grid;
    let field = displace_wavefunction(&ground_state(grid, &p)?, c(1.0, 0.0), &p)?;
    let coarse = propagate_cycle(&field, &PropagatorConfig::new(grid, 2048)?, &p)?;
    let fine = propagate_cycle(&field, &PropagatorConfig::new(grid, 4096)?, &p)?;
    let total = circular_distance(coarse.total_phase, PI);
    let geometric = circular_distance(coarse.geometric_phase, 0.0);
    let radius = (coarse.circle_fit()?.radius - SQRT_2).abs();
    let ratio = total / circular_distance(fine.total_phase, PI);
    Ok((
        total <= 1e-2 && geometric <= 2e-2 && radius <= 1e-2 && ratio >= 3.5 && coarse.norm_drift <= 1e-10 && coarse.energy_drift <= 1e-6,
        format!(
            "total {total:.1e}, geometric {geometric:.1e}, radius {radius:.1e}, refinement ratio {ratio:.2}, norm drift {:.1e}, energy drift {:.1e}",
            coarse.norm_drift, coarse.energy_drift
        ),
    ))
}

fn operator_identities() -> Result<(bool, String)> {
    let t = FockTruncation::new(24, 24)?;
    let mut worst = 0.0f64;
    let zero = c(0.0, 0.0);
    let a = build_ladder(Mode::A, t);
    let b = build_ladder(Mode::B, t);
    let safe1 = SafeSubspace::new(t, 1, 1);
    worst = worst.max(safe1.distance_to_identity(&a.commutator(&a.adjoint()), c(1.0, 0.0)));
    worst = worst.max(safe1.distance_to_identity(&b.commutator(&b.adjoint()), c(1.0, 0.0)));
    worst = worst.max(safe1.distance_to_identity(&a.commutator(&b), zero));
    worst = worst.max(safe1.distance_to_identity(&a.commutator(&b.adjoint()), zero));
    let safe = SafeSubspace::new(t, 2, 2);
    for eps in [ChargeSign::Positive, ChargeSign::Negative] {
        let p = PhysicalParams::new(eps, 1.0)?;
        let ops = build_position_momentum(&p, t);
        worst = worst.max(safe.distance_to_identity(&ops.x.commutator(&ops.p_x), c(0.0, 1.0)));
        worst = worst.max(safe.distance_to_identity(&ops.y.commutator(&ops.p_y), c(0.0, 1.0)));
        worst = worst.max(safe.distance_to_identity(&ops.x.commutator(&ops.p_y), zero));
        worst = worst.max(safe.distance_to_identity(&ops.y.commutator(&ops.p_x), zero));
        worst = worst.max(safe.distance_to_identity(&ops.x.commutator(&ops.y), zero));
        worst = worst.max(safe.distance(
            &symmetric_gauge_hamiltonian(&p, &ops),
            &build_hamiltonian(&p, t),
        ));
        worst = worst.max(safe.distance(
            &canonical_angular_momentum(&ops),
            &build_angular_momentum(&p, t),
        ));
    }
    Ok((worst <= 1e-10, format!("max deviation {worst:.1e}")))
}

fn displacement_unitarity() -> Result<(bool, String)> {
    let t = FockTruncation::new(60, 0)?;
    let worst = [c(0.5, 0.0), c(1.0, 1.0), C64::from_polar(2.0, PI / 3.0)]
        .iter()
        .map(|&a| displacement_matrix(a, t).map(|d| d.unitarity_defect()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok((worst <= 1e-10, format!("max defect {worst:.1e}")))
}

pub fn run_checks(mut report: impl FnMut(&CheckOutcome)) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(name, check)| {
            let start = Instant::now();
            let (passed, detail) = match check() {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            let outcome = CheckOutcome {
                name,
                passed,
                detail,
                seconds: start.elapsed().as_secs_f64(),
            };
            report(&outcome);
            outcome
        })
        .collect()
}

/// Prints the pass/fail table; `true` when every check passed.
pub fn run_suite(out: &mut impl Write) -> std::io::Result<bool> {
    writeln!(
        out,
        "{:<34} {:<6} {:>8}  detail",
        "check", "result", "seconds"
    )?;
    let mut io = Ok(());
    let outcomes = run_checks(|o| {
        if io.is_ok() {
            let verdict = if o.passed { "PASS" } else { "FAIL" };
            io = writeln!(
                out,
                "{:<34} {:<6} {:>8.2}  {}",
                o.name, verdict, o.seconds, o.detail
            )
            .and_then(|()| out.flush());
        }
    });
    io?;
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    writeln!(
        out,
        "{} of {} checks passed",
        outcomes.len() - failed,
        outcomes.len()
    )?;
    Ok(failed == 0)
}
