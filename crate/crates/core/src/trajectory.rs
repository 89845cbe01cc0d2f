//! Orbit of the packet center and an algebraic circle fit.

use std::io::Write;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::evolve;
use crate::error::{Error, Result};
use crate::fock::{build_position_momentum, expectation_real, Mode};
use crate::params::PhysicalParams;
use crate::state::TwoModeState;
use crate::states::ladder_mean;

/// Matrix and closed-form center positions may differ by at most this much
/// before the truncation is declared leaky.
pub const PATH_AGREEMENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub x_closed: Option<f64>,
    pub y_closed: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub params: PhysicalParams,
    /// Largest distance between the two center evaluations, when both exist.
    pub max_discrepancy: Option<f64>,
}

impl Trajectory {
    /// Writes `t,x,y,x_closed,y_closed`; missing closed-form values are left empty.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,x,y,x_closed,y_closed")?;
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        for s in &self.samples {
            writeln!(
                out,
                "{},{},{},{},{}",
                s.t,
                s.x,
                s.y,
                opt(s.x_closed),
                opt(s.y_closed)
            )?;
        }
        Ok(())
    }
}

/// Center `(x, y)` at time `t` from the initial ladder means:
/// `x = s (beta_bx + |beta_a| cos(wt - arg beta_a))`,
/// `y = -eps s (beta_by + |beta_a| sin(wt - arg beta_a))`, `s = sqrt(2 hbar / M w)`.
pub fn closed_form_center(beta_a: C64, beta_b: C64, params: &PhysicalParams, t: f64) -> (f64, f64) {
    let s = params.orbit_scale();
    let eps = params.eps();
    let phase = params.omega_b * t - beta_a.arg();
    let r = beta_a.norm();
    let x = s * beta_b.re + s * r * phase.cos();
    let y = -eps * s * beta_b.im - eps * s * r * phase.sin();
    // adding 0.0 turns -0.0 into 0.0 for stable text output
    (x + 0.0, y + 0.0)
}

/// Samples the center over one period at `n_samples` uniform times in `[0, T]`,
/// once through position matrices and once in closed form.
pub fn center_trajectory(
    state: &TwoModeState,
    params: &PhysicalParams,
    n_samples: usize,
) -> Result<Trajectory> {
    if n_samples < 8 {
        return Err(Error::InvalidParams(format!(
            "need at least 8 trajectory samples, got {n_samples}"
        )));
    }
    state.ensure_normalized()?;
    let ops = build_position_momentum(params, state.trunc());
    let beta_a = ladder_mean(state, Mode::A);
    let beta_b = ladder_mean(state, Mode::B);
    let dt = params.period() / (n_samples - 1) as f64;

    let samples = (0..n_samples)
        .into_par_iter()
        .map(|k| {
            let t = k as f64 * dt;
            let evolved = evolve(state, t, params);
            let x = expectation_real(&ops.x, &evolved)?;
            let y = expectation_real(&ops.y, &evolved)?;
            let (xc, yc) = closed_form_center(beta_a, beta_b, params, t);
            Ok(TrajectorySample {
                t,
                x,
                y,
                x_closed: Some(xc),
                y_closed: Some(yc),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let max_discrepancy = samples
        .iter()
        .map(|s| (s.x - s.x_closed.unwrap()).hypot(s.y - s.y_closed.unwrap()))
        .fold(0.0, f64::max);
    if max_discrepancy > PATH_AGREEMENT_TOL {
        return Err(Error::TruncationInadequate(format!(
            "center from position matrices deviates from closed form by {max_discrepancy:e}"
        )));
    }
    Ok(Trajectory {
        samples,
        params: *params,
        max_discrepancy: Some(max_discrepancy),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Handedness {
    Clockwise,
    Anticlockwise,
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleFit {
    pub center: [f64; 2],
    pub radius: f64,
    /// Magnitude of the mean angular velocity about the fitted center.
    pub angular_frequency: f64,
    pub handedness: Handedness,
    pub rms_residual: f64,
    pub degenerate: bool,
}

/// Radii below this are reported as a fixed point.
pub const DEGENERATE_RADIUS: f64 = 1e-12;

/// Algebraic (Kasa) least-squares circle through the matrix-path samples.
pub fn fit_circle(traj: &Trajectory) -> Result<CircleFit> {
    let pts: Vec<(f64, f64, f64)> = traj.samples.iter().map(|s| (s.t, s.x, s.y)).collect();
    fit_circle_points(&pts)
}

/// Same as [`fit_circle`] on raw `(t, x, y)` triples.
pub fn fit_circle_points(pts: &[(f64, f64, f64)]) -> Result<CircleFit> {
    if pts.len() < 8 {
        return Err(Error::InvalidParams(format!(
            "circle fit needs at least 8 samples, got {}",
            pts.len()
        )));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.2).sum::<f64>() / m;
    let spread = pts
        .iter()
        .map(|p| (p.1 - mx).hypot(p.2 - my))
        .fold(0.0, f64::max);
    if spread < DEGENERATE_RADIUS {
        let rms = (pts
            .iter()
            .map(|p| (p.1 - mx).powi(2) + (p.2 - my).powi(2))
            .sum::<f64>()
            / m)
            .sqrt();
        return Ok(CircleFit {
            center: [mx, my],
            radius: 0.0,
            angular_frequency: 0.0,
            handedness: Handedness::Undefined,
            rms_residual: rms,
            degenerate: true,
        });
    }

    // minimise sum (u^2 + v^2 + D u + E v + F)^2 in centered coordinates
    let mut ata = Matrix3::<f64>::zeros();
    let mut atb = Vector3::<f64>::zeros();
    for p in pts {
        let (u, v) = (p.1 - mx, p.2 - my);
        let row = [u, v, 1.0];
        let rhs = -(u * u + v * v);
        for i in 0..3 {
            for j in 0..3 {
                ata[(i, j)] += row[i] * row[j];
            }
            atb[i] += row[i] * rhs;
        }
    }
    let sol = ata
        .lu()
        .solve(&atb)
        .ok_or_else(|| Error::InvalidParams("collinear samples: circle fit is singular".into()))?;
    let (d, e, f) = (sol[0], sol[1], sol[2]);
    let cu = -0.5 * d;
    let cv = -0.5 * e;
    let r2 = cu * cu + cv * cv - f;
    let radius = r2.max(0.0).sqrt();
    let center = [mx + cu, my + cv];

    let rms_residual = (pts
        .iter()
        .map(|p| ((p.1 - center[0]).hypot(p.2 - center[1]) - radius).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();

    if radius < DEGENERATE_RADIUS {
        return Ok(CircleFit {
            center,
            radius: 0.0,
            angular_frequency: 0.0,
            handedness: Handedness::Undefined,
            rms_residual,
            degenerate: true,
        });
    }

    // unwrap the polar angle and regress it on time
    let mut angles = Vec::with_capacity(pts.len());
    let mut prev: Option<f64> = None;
    for p in pts {
        let raw = (p.2 - center[1]).atan2(p.1 - center[0]);
        let a = match prev {
            None => raw,
            Some(q) => q + crate::angle::wrap(raw - q),
        };
        angles.push(a);
        prev = Some(a);
    }
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let ma = angles.iter().sum::<f64>() / m;
    let (mut sta, mut stt) = (0.0, 0.0);
    for (p, a) in pts.iter().zip(&angles) {
        sta += (p.0 - mt) * (a - ma);
        stt += (p.0 - mt) * (p.0 - mt);
    }
    let slope = if stt > 0.0 { sta / stt } else { 0.0 };
    let handedness = if slope > 0.0 {
        Handedness::Anticlockwise
    } else if slope < 0.0 {
        Handedness::Clockwise
    } else {
        Handedness::Undefined
    };

    Ok(CircleFit {
        center,
        radius,
        angular_frequency: slope.abs(),
        handedness,
        rms_residual,
        degenerate: false,
    })
}
