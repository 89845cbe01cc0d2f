//! Exact cyclotron dynamics on the Fock basis and the phases of one period.
//!
//! With `H = hbar omega_B (N + 1/2)` every state returns to itself after
//! `T = 2 pi / omega_B` up to the global factor `exp(-i pi)`. The dynamic phase
//! is `-T <H> / hbar` and the geometric phase is the (wrapped) difference.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::{circular_distance, wrap};
use crate::error::{Error, Result};
use crate::fock::{build_hamiltonian, expectation_real};
use crate::params::{FockTruncation, PhysicalParams, HBAR};
use crate::state::TwoModeState;
use crate::states::{make_state, mean_and_variance_a, mean_number_a, StateSpec};

/// `exp(-i H t / hbar)` applied exactly: each `|n n'>` picks up `exp(-i omega t (n + 1/2))`.
pub fn evolve(state: &TwoModeState, t: f64, params: &PhysicalParams) -> TwoModeState {
    let w = params.omega_b;
    let mut amps = state.amps().clone();
    for (n, mut row) in amps.outer_iter_mut().enumerate() {
        let phase = C64::from_polar(1.0, -w * t * (n as f64 + 0.5));
        row.mapv_inplace(|c| c * phase);
    }
    TwoModeState::from_raw(amps, state.trunc())
}

/// Phases and flux bookkeeping of one cyclotron period. Angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    /// `arg <psi(0)|psi(T)>` in `(-pi, pi]`.
    pub total_phase: f64,
    /// `-(1/hbar) int <H> dt`, not wrapped.
    pub dynamic_phase: f64,
    /// `total - dynamic` in `(-pi, pi]`.
    pub geometric_phase: f64,
    pub mean_n: f64,
    pub mean_a: C64,
    pub delta_a_sq: f64,
    /// `q Phi / (hbar c)`.
    pub reduced_flux: f64,
    /// `wrap(gamma + reduced_flux - 2 pi (Delta a)^2)`.
    pub flux_residual: f64,
}

pub fn phase_report(state: &TwoModeState, params: &PhysicalParams) -> Result<PhaseReport> {
    state.ensure_normalized()?;
    let period = params.period();
    let final_state = evolve(state, period, params);
    let overlap = state.inner(&final_state)?;
    let total_phase = wrap(overlap.arg());

    let h = build_hamiltonian(params, state.trunc());
    let mean_h = expectation_real(&h, state)?;
    let dynamic_phase = -period * mean_h / HBAR;

    let mean_n = mean_number_a(state);
    let closed = -PI - TAU * mean_n;
    if (dynamic_phase - closed).abs() > 1e-9 * closed.abs().max(1.0) {
        return Err(Error::InvariantViolation(format!(
            "dynamic phase {dynamic_phase} disagrees with -pi - 2 pi <N> = {closed}"
        )));
    }

    let geometric_phase = wrap(total_phase - dynamic_phase);
    let moments = mean_and_variance_a(state);
    let reduced_flux = -TAU * moments.mean_a.norm_sqr();
    let flux_residual = wrap(geometric_phase + reduced_flux - TAU * moments.delta_a_sq);

    Ok(PhaseReport {
        total_phase,
        dynamic_phase,
        geometric_phase,
        mean_n,
        mean_a: moments.mean_a,
        delta_a_sq: moments.delta_a_sq,
        reduced_flux,
        flux_residual,
    })
}

impl PhaseReport {
    /// Circular distance between `gamma` and `2 pi <N>`.
    pub fn number_identity_gap(&self) -> f64 {
        circular_distance(self.geometric_phase, TAU * self.mean_n)
    }
}

/// Dynamic phase by trapezoidal quadrature of `<H>_t` over `samples` points of
/// the evolved state.
pub fn dynamic_phase_quadrature(
    state: &TwoModeState,
    params: &PhysicalParams,
    samples: usize,
) -> Result<f64> {
    let samples = samples.max(2);
    let period = params.period();
    let h = build_hamiltonian(params, state.trunc());
    let dt = period / (samples - 1) as f64;
    let values = (0..samples)
        .map(|k| expectation_real(&h, &evolve(state, k as f64 * dt, params)))
        .collect::<Result<Vec<_>>>()?;
    let interior: f64 = values[1..samples - 1].iter().sum();
    let integral = dt * (0.5 * (values[0] + values[samples - 1]) + interior);
    Ok(-integral / HBAR)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnclosedFlux {
    /// `Phi` in units of `flux_unit`-scaled `hbar c / |q|`; positive for anticlockwise orbits.
    pub flux: f64,
    pub reduced_flux: f64,
}

/// Flux through the orbit of the packet center: `Phi = -(hbar c / q) 2 pi |<a>|^2`.
pub fn enclosed_flux(state: &TwoModeState, params: &PhysicalParams) -> Result<EnclosedFlux> {
    state.ensure_normalized()?;
    let reduced_flux = -TAU * mean_and_variance_a(state).mean_a.norm_sqr();
    // q = eps |q|, so hbar c / q = eps * flux_unit
    let flux = reduced_flux * params.eps() * params.flux_unit;
    Ok(EnclosedFlux { flux, reduced_flux })
}

/// Largest `1 - |<n, alpha e^{-i omega t}| psi(t)>|` over `times` for the
/// evolved displaced number state `|n, alpha>`.
pub fn shape_preservation_check(
    n: usize,
    alpha: C64,
    params: &PhysicalParams,
    trunc: FockTruncation,
    times: &[f64],
) -> Result<f64> {
    let initial = make_state(&StateSpec::displaced_number(n, alpha), trunc)?;
    let w = params.omega_b;
    let infidelities = times
        .par_iter()
        .map(|&t| {
            let evolved = evolve(&initial, t, params);
            let moved = make_state(
                &StateSpec::displaced_number(n, alpha * C64::from_polar(1.0, -w * t)),
                trunc,
            )?;
            Ok(1.0 - moved.inner(&evolved)?.norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(infidelities.into_iter().fold(0.0, f64::max))
}
