use std::f64::consts::PI;

use landau_core::angle::circular_distance;
use landau_core::error::Error;
use landau_core::grid::GridField;
use landau_core::oracle::*;
use landau_core::realspace::{displace_wavefunction, ground_state};
use landau_core::states::StateSpec;
use landau_core::trajectory::Handedness;
use landau_core::{ChargeSign, FockTruncation, PhysicalParams};
use num_complex::Complex64 as C64;

fn coherent_field(alpha: C64, cfg: &PropagatorConfig, p: &PhysicalParams) -> GridField {
    displace_wavefunction(&ground_state(cfg.grid, p).unwrap(), alpha, p).unwrap()
}

#[test]
fn coherent_cycle_closes_with_expected_phases() {
    let p = PhysicalParams::default();
    let cfg = PropagatorConfig::default_for(&p);
    let r = propagate_cycle(&coherent_field(C64::new(1.0, 0.0), &cfg, &p), &cfg, &p).unwrap();
    assert!((r.overlap_magnitude - 1.0).abs() < 1e-3);
    assert!(
        circular_distance(r.total_phase, PI) < 1e-2,
        "{}",
        r.total_phase
    );
    assert!(
        circular_distance(r.geometric_phase, 0.0) < 2e-2,
        "{}",
        r.geometric_phase
    );
    // <H> = omega (|alpha|^2 + 1/2)
    assert!((r.dynamic_phase + 2.0 * PI * 1.5).abs() < 1e-4);
    assert!(r.norm_drift < 1e-10);
    assert!(r.energy_drift < 1e-6);
    assert_eq!(r.trajectory.samples.len(), TRAJECTORY_SAMPLES + 1);
    let fit = r.circle_fit().unwrap();
    assert!((fit.radius - 2f64.sqrt()).abs() < 1e-2);
    assert_eq!(fit.handedness, Handedness::Clockwise);
}

#[test]
fn negative_charge_orbits_anticlockwise() {
    let p = PhysicalParams::new(ChargeSign::Negative, 1.0).unwrap();
    let cfg = PropagatorConfig::new(PropagatorConfig::default_for(&p).grid, 1024).unwrap();
    let r = propagate_cycle(&coherent_field(C64::new(0.0, 1.0), &cfg, &p), &cfg, &p).unwrap();
    let fit = r.circle_fit().unwrap();
    assert_eq!(fit.handedness, Handedness::Anticlockwise);
    assert!((fit.angular_frequency - 1.0).abs() < 1e-3);
}

#[test]
fn phase_error_is_second_order_in_dt() {
    let p = PhysicalParams::default();
    let grid = PropagatorConfig::default_for(&p).grid;
    let err = |steps| {
        let cfg = PropagatorConfig::new(grid, steps).unwrap();
        let r = propagate_cycle(&coherent_field(C64::new(1.0, 0.0), &cfg, &p), &cfg, &p).unwrap();
        circular_distance(r.total_phase, PI)
    };
    let (coarse, fine) = (err(1024), err(2048));
    assert!(coarse / fine > 3.5, "{coarse} / {fine}");
}

#[test]
fn observer_sees_every_step() {
    let p = PhysicalParams::default();
    let cfg = PropagatorConfig::new(PropagatorConfig::default_for(&p).grid, 1024).unwrap();
    let mut seen = 0;
    propagate_cycle_with(
        &coherent_field(C64::new(0.5, 0.0), &cfg, &p),
        &cfg,
        &p,
        |_, _| {
            seen += 1;
            Ok(())
        },
    )
    .unwrap();
    assert_eq!(seen, 1025);
}

#[test]
fn packet_leaving_the_grid_is_reported() {
    let p = PhysicalParams::default();
    let cfg = PropagatorConfig::new(PropagatorConfig::default_for(&p).grid, 1024).unwrap();
    // momentum kick 5: orbit radius 5 about a displaced centre
    let f0 = GridField::from_fn(cfg.grid, |x, y| {
        C64::from_polar((-0.25 * (x * x + y * y)).exp(), 5.0 * x)
    })
    .normalized()
    .unwrap();
    assert!(matches!(
        propagate_cycle(&f0, &cfg, &p),
        Err(Error::BoundaryViolation { .. })
    ));
}

#[test]
fn vacuum_cross_validation() {
    let p = PhysicalParams::default();
    let r = cross_validate(
        &StateSpec::number(0, 0),
        &PropagatorConfig::default_for(&p),
        &p,
        FockTruncation::new(2, 0).unwrap(),
    )
    .unwrap();
    for d in [
        r.total_phase.discrepancy,
        r.dynamic_phase.discrepancy,
        r.geometric_phase.discrepancy,
    ] {
        assert!(d <= 1e-3, "{d}");
    }
    assert!(r.trajectory_max_deviation <= 1e-3);
    assert!(r.final_state_infidelity <= 1e-3);
    assert!(r.passed);
}

#[test]
fn displaced_number_cross_validation() {
    let p = PhysicalParams::default();
    let spec = StateSpec::displaced_number(1, C64::new(0.8, 0.0));
    let r = cross_validate(
        &spec,
        &PropagatorConfig::default_for(&p),
        &p,
        FockTruncation::new(18, 0).unwrap(),
    )
    .unwrap();
    assert!(r.trajectory_max_deviation <= 1e-2);
    assert!(r.passed);
}

#[test]
fn superposition_cross_validation() {
    let p = PhysicalParams::default();
    let one = C64::new(1.0, 0.0);
    let spec = StateSpec::superposition(vec![(0, 0, one), (1, 0, one)]);
    let r = cross_validate(
        &spec,
        &PropagatorConfig::default_for(&p),
        &p,
        FockTruncation::new(3, 0).unwrap(),
    )
    .unwrap();
    assert!(circular_distance(r.geometric_phase.numeric, PI) <= 2e-2);
    assert!(r.geometric_phase.discrepancy <= 2e-2);
}

#[test]
fn b_shifted_cross_validation() {
    let p = PhysicalParams::new(ChargeSign::Negative, 1.0).unwrap();
    let spec = StateSpec::coherent(C64::new(0.6, 0.3)).with_b_shift(C64::new(0.2, -0.3));
    let r = cross_validate(
        &spec,
        &PropagatorConfig::default_for(&p),
        &p,
        FockTruncation::new(16, 14).unwrap(),
    )
    .unwrap();
    assert!(r.passed, "{r:?}");
}
