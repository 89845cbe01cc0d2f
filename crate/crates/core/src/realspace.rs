//! Configuration-space wavefunctions.
//!
//! With `z = sqrt(M omega / 4 hbar) (x + i eps y)` the ladder operators act as
//! `a = (z + d/dz*)/sqrt2`, `a^dag = (z* - d/dz)/sqrt2`, `b = (z* + d/dz)/sqrt2`,
//! `b^dag = (z - d/dz*)/sqrt2`. Ground states are `exp(-z* z) f(z)` for any
//! polynomial `f`; excited states follow from repeated `a^dag`.
//!
//! Derivatives and translations are spectral, so fields must decay to
//! negligible density at the grid edge.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{derivative_wavenumbers, wavenumbers, Fft2};
use crate::grid::{GridField, GridSpec, BOUNDARY_DENSITY_LIMIT};
use crate::params::{FockTruncation, PhysicalParams, HBAR, MASS};
use crate::state::TwoModeState;

/// Polynomial `f(z) = sum_k coeffs[k] z^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolomorphicPoly {
    coeffs: Vec<C64>,
}

impl HolomorphicPoly {
    pub fn new(mut coeffs: Vec<C64>) -> Result<Self> {
        while coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidParams(
                "f(z) must not vanish identically".into(),
            ));
        }
        Ok(HolomorphicPoly { coeffs })
    }

    pub fn one() -> Self {
        HolomorphicPoly {
            coeffs: vec![C64::new(1.0, 0.0)],
        }
    }

    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); k + 1];
        coeffs[k] = C64::new(1.0, 0.0);
        HolomorphicPoly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Derivative; the zero polynomial is represented by a single zero coefficient.
    pub fn derivative(&self) -> HolomorphicPoly {
        if self.coeffs.len() == 1 {
            return HolomorphicPoly {
                coeffs: vec![C64::new(0.0, 0.0)],
            };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
        HolomorphicPoly { coeffs }
    }
}

/// `sqrt(M omega / 4 hbar)`.
fn z_scale(params: &PhysicalParams) -> f64 {
    (MASS * params.omega_b / (4.0 * HBAR)).sqrt()
}

/// Complex coordinate `z` at `(x, y)`.
pub fn z_coordinate(x: f64, y: f64, params: &PhysicalParams) -> C64 {
    C64::new(x, params.eps() * y) * z_scale(params)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `psi_n ~ (-1)^n exp(z* z) d^n/dz^n [exp(-2 z* z) f(z)]`, evaluated through
/// `exp(-z* z) sum_k C(n,k) (-2 z*)^(n-k) f^(k)(z)` and normalized by quadrature.
pub fn number_wavefunction(
    n: usize,
    f: &HolomorphicPoly,
    grid: GridSpec,
    params: &PhysicalParams,
) -> Result<GridField> {
    let field = number_wavefunction_unchecked(n, f, grid, params)?;
    field.check_boundary(BOUNDARY_DENSITY_LIMIT)?;
    Ok(field)
}

fn number_wavefunction_unchecked(
    n: usize,
    f: &HolomorphicPoly,
    grid: GridSpec,
    params: &PhysicalParams,
) -> Result<GridField> {
    grid.validate()?;
    let mut derivs = vec![f.clone()];
    for _ in 0..n.min(f.degree()) {
        let d = derivs.last().unwrap().derivative();
        derivs.push(d);
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    GridField::from_fn(grid, |x, y| {
        let z = z_coordinate(x, y, params);
        let zc = z.conj();
        let sum: C64 = derivs
            .iter()
            .enumerate()
            .map(|(k, fk)| (-2.0 * zc).powu((n - k) as u32) * fk.eval(z) * binomial(n, k))
            .sum();
        sum * (-(z.norm_sqr())).exp() * sign
    })
    .normalized()
}

/// Normalized `f = 1` ground state, `sqrt(M omega / 2 pi hbar) exp(-|z|^2)` on an unbounded plane.
pub fn ground_state(grid: GridSpec, params: &PhysicalParams) -> Result<GridField> {
    number_wavefunction(0, &HolomorphicPoly::one(), grid, params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderOp {
    A,
    ADag,
    B,
    BDag,
}

/// Spectral differential operators on a fixed grid.
pub struct GridLadder {
    grid: GridSpec,
    fft: Fft2,
    kx: Vec<f64>,
    ky: Vec<f64>,
    filter_x: Vec<f64>,
    filter_y: Vec<f64>,
    z: Array2<C64>,
    eps: f64,
    kappa: f64,
}

impl GridLadder {
    pub fn new(grid: GridSpec, params: &PhysicalParams) -> Self {
        let z = Array2::from_shape_fn((grid.ny, grid.nx), |(j, i)| {
            z_coordinate(grid.x(i), grid.y(j), params)
        });
        GridLadder {
            grid,
            fft: Fft2::new(grid.nx, grid.ny),
            kx: derivative_wavenumbers(grid.nx, grid.dx()),
            ky: derivative_wavenumbers(grid.ny, grid.dy()),
            filter_x: spectral_filter(grid.nx),
            filter_y: spectral_filter(grid.ny),
            z,
            eps: params.eps(),
            kappa: z_scale(params),
        }
    }

    /// `d/dz` (`conj = false`) or `d/dz*` (`conj = true`):
    /// `(d/dx -+ i eps d/dy) / (2 kappa)`.
    fn wirtinger(&self, values: &Array2<C64>, conj: bool) -> Array2<C64> {
        let mut w = values.clone();
        self.fft.forward(&mut w);
        let s = if conj { 1.0 } else { -1.0 };
        let norm = 1.0 / (2.0 * self.kappa);
        for ((j, i), v) in w.indexed_iter_mut() {
            // d/dx -> i kx, i eps d/dy -> i eps (i ky) = -eps ky
            let symbol = C64::new(-s * self.eps * self.ky[j], self.kx[i]);
            *v *= symbol * (norm * self.filter_x[i] * self.filter_y[j]);
        }
        self.fft.inverse(&mut w);
        w
    }

    /// Applies a ladder operator without any boundary check.
    pub fn apply_unchecked(&self, op: LadderOp, field: &GridField) -> GridField {
        let v = &field.values;
        let values = match op {
            LadderOp::A => {
                let d = self.wirtinger(v, true);
                ndarray::Zip::from(v)
                    .and(&self.z)
                    .and(&d)
                    .map_collect(|p, z, d| (z * p + d) * FRAC_1_SQRT_2)
            }
            LadderOp::ADag => {
                let d = self.wirtinger(v, false);
                ndarray::Zip::from(v)
                    .and(&self.z)
                    .and(&d)
                    .map_collect(|p, z, d| (z.conj() * p - d) * FRAC_1_SQRT_2)
            }
            LadderOp::B => {
                let d = self.wirtinger(v, false);
                ndarray::Zip::from(v)
                    .and(&self.z)
                    .and(&d)
                    .map_collect(|p, z, d| (z.conj() * p + d) * FRAC_1_SQRT_2)
            }
            LadderOp::BDag => {
                let d = self.wirtinger(v, true);
                ndarray::Zip::from(v)
                    .and(&self.z)
                    .and(&d)
                    .map_collect(|p, z, d| (z * p - d) * FRAC_1_SQRT_2)
            }
        };
        GridField {
            values,
            grid: self.grid,
        }
    }

    pub fn apply(&self, op: LadderOp, field: &GridField) -> Result<GridField> {
        let out = self.apply_unchecked(op, field);
        let scale = out.norm_sqr().max(field.norm_sqr()).max(f64::MIN_POSITIVE);
        let density = out.boundary_density() / scale;
        if density > BOUNDARY_DENSITY_LIMIT {
            return Err(Error::BoundaryViolation {
                density,
                limit: BOUNDARY_DENSITY_LIMIT,
            });
        }
        Ok(out)
    }
}

/// Exponential filter `exp(-36 (|k| / k_max)^36)` in FFT order; it leaves the
/// resolved band untouched and damps the near-Nyquist modes where edge
/// residue would otherwise be amplified by repeated differentiation.
fn spectral_filter(n: usize) -> Vec<f64> {
    let half = (n / 2) as f64;
    (0..n)
        .map(|j| {
            let m = if j <= n / 2 { j as f64 } else { (n - j) as f64 };
            (-36.0 * (m / half).powi(36)).exp()
        })
        .collect()
}

/// One-shot ladder application; see [`GridLadder`] for repeated use.
pub fn apply_ladder_grid(
    op: LadderOp,
    field: &GridField,
    params: &PhysicalParams,
) -> Result<GridField> {
    GridLadder::new(field.grid, params).apply(op, field)
}

/// Displaced wavefunction
/// `exp[i sqrt(M w / 2 hbar)(a_y x - eps a_x y)] psi(x - s a_x, y - eps s a_y)`, `s = sqrt(2 hbar / M w)`.
pub fn displace_wavefunction(
    field: &GridField,
    alpha: C64,
    params: &PhysicalParams,
) -> Result<GridField> {
    if alpha == C64::new(0.0, 0.0) {
        return Ok(field.clone());
    }
    let grid = field.grid;
    let eps = params.eps();
    let s = params.orbit_scale();
    let (shift_x, shift_y) = (s * alpha.re, eps * s * alpha.im);

    let fft = Fft2::new(grid.nx, grid.ny);
    let kx = wavenumbers(grid.nx, grid.dx());
    let ky = wavenumbers(grid.ny, grid.dy());
    let mut w = field.values.clone();
    fft.forward(&mut w);
    for ((j, i), v) in w.indexed_iter_mut() {
        *v *= C64::from_polar(1.0, -(kx[i] * shift_x + ky[j] * shift_y));
    }
    fft.inverse(&mut w);

    let q = (MASS * params.omega_b / (2.0 * HBAR)).sqrt();
    for ((j, i), v) in w.indexed_iter_mut() {
        let (x, y) = (grid.x(i), grid.y(j));
        *v *= C64::from_polar(1.0, q * (alpha.im * x - eps * alpha.re * y));
    }
    let out = GridField { values: w, grid };
    out.check_boundary(BOUNDARY_DENSITY_LIMIT)?;
    Ok(out)
}

/// How the grid images of `|n n'>` are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisRoute {
    /// `b^dag` then `a^dag` steps from the `f = 1` ground state.
    Ladder,
    /// Closed-form excited states with `f(z) = z^n'`; no repeated differentiation.
    ClosedForm,
}

/// Orthonormal grid images of `|n n'>`. Each function is Gram-Schmidt
/// corrected against the ones built before it, which removes numerical drift
/// without changing the phase convention of `|n n'> = (a^dag)^n (b^dag)^n' |00> / sqrt(n! n'!)`.
pub struct FockGridBasis {
    pub trunc: FockTruncation,
    pub grid: GridSpec,
    /// Indexed by [`FockTruncation::index`].
    pub fields: Vec<GridField>,
}

impl FockGridBasis {
    pub fn build(trunc: FockTruncation, grid: GridSpec, params: &PhysicalParams) -> Result<Self> {
        Self::build_with(trunc, grid, params, BasisRoute::Ladder)
    }

    pub fn build_with(
        trunc: FockTruncation,
        grid: GridSpec,
        params: &PhysicalParams,
        route: BasisRoute,
    ) -> Result<Self> {
        let ladder = GridLadder::new(grid, params);
        let ground = ground_state(grid, params)?;
        let mut fields: Vec<Option<GridField>> = vec![None; trunc.dim()];
        let mut built: Vec<usize> = Vec::with_capacity(trunc.dim());

        for np in 0..trunc.levels_b() {
            for n in 0..trunc.levels_a() {
                let raw = match (route, n, np) {
                    (_, 0, 0) => ground.clone(),
                    (BasisRoute::ClosedForm, _, _) => number_wavefunction_unchecked(
                        n,
                        &HolomorphicPoly::monomial(np),
                        grid,
                        params,
                    )?,
                    (BasisRoute::Ladder, 0, _) => {
                        let prev = fields[trunc.index(0, np - 1)].as_ref().unwrap();
                        scale(
                            ladder.apply_unchecked(LadderOp::BDag, prev),
                            1.0 / (np as f64).sqrt(),
                        )
                    }
                    (BasisRoute::Ladder, _, _) => {
                        let prev = fields[trunc.index(n - 1, np)].as_ref().unwrap();
                        scale(
                            ladder.apply_unchecked(LadderOp::ADag, prev),
                            1.0 / (n as f64).sqrt(),
                        )
                    }
                };
                let mut v = raw;
                for &k in &built {
                    let e = fields[k].as_ref().unwrap();
                    let overlap = e.inner(&v)?;
                    ndarray::Zip::from(&mut v.values)
                        .and(&e.values)
                        .for_each(|a, b| *a -= overlap * b);
                }
                let v = v.normalized()?;
                let idx = trunc.index(n, np);
                fields[idx] = Some(v);
                built.push(idx);
            }
        }
        Ok(FockGridBasis {
            trunc,
            grid,
            fields: fields.into_iter().map(Option::unwrap).collect(),
        })
    }

    /// Quadrature Gram matrix of the basis.
    pub fn gram(&self) -> Result<Array2<C64>> {
        let d = self.fields.len();
        let mut g = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                g[[i, j]] = self.fields[i].inner(&self.fields[j])?;
            }
        }
        Ok(g)
    }

    /// `sum c_{n n'} psi_{n n'}`.
    pub fn synthesize(&self, state: &TwoModeState) -> Result<GridField> {
        if state.trunc() != self.trunc {
            return Err(Error::DimensionMismatch {
                expected: self.trunc.dim(),
                got: state.trunc().dim(),
            });
        }
        let mut out = GridField::zeros(self.grid);
        for (c, f) in state.as_slice().iter().zip(&self.fields) {
            if *c != C64::new(0.0, 0.0) {
                ndarray::Zip::from(&mut out.values)
                    .and(&f.values)
                    .for_each(|a, b| *a += c * b);
            }
        }
        Ok(out)
    }

    pub fn project(&self, field: &GridField) -> Result<FockProjection> {
        let field_norm = field.norm_sqr();
        let mut amps = Array2::zeros((self.trunc.levels_a(), self.trunc.levels_b()));
        for (idx, basis) in self.fields.iter().enumerate() {
            let (n, np) = self.trunc.levels_of(idx);
            amps[[n, np]] = basis.inner(field)? / field_norm.sqrt();
        }
        let captured_norm: f64 = amps.iter().map(|c: &C64| c.norm_sqr()).sum();
        if captured_norm < MIN_CAPTURED_NORM {
            return Err(Error::TruncationInadequate(format!(
                "Fock projection captured only {captured_norm:.6} of the norm"
            )));
        }
        let state = TwoModeState::from_amplitudes(amps.clone(), self.trunc)?;
        Ok(FockProjection {
            amplitudes: amps,
            captured_norm,
            state,
        })
    }
}

fn scale(mut f: GridField, s: f64) -> GridField {
    f.values.mapv_inplace(|z| z * s);
    f
}

pub const MIN_CAPTURED_NORM: f64 = 0.999;

#[derive(Debug, Clone)]
pub struct FockProjection {
    /// Raw overlaps `<n n'|psi>` of the normalized field.
    pub amplitudes: Array2<C64>,
    pub captured_norm: f64,
    /// Renormalized state built from the overlaps.
    pub state: TwoModeState,
}

/// Projects a grid field onto the truncated `|n n'>` basis.
pub fn project_to_fock(
    field: &GridField,
    params: &PhysicalParams,
    trunc: FockTruncation,
) -> Result<FockProjection> {
    field.check_boundary(BOUNDARY_DENSITY_LIMIT)?;
    FockGridBasis::build(trunc, field.grid, params)?.project(field)
}

/// Peak density of the normalized Gaussian ground state, `M omega / (2 pi hbar)`.
pub fn ground_peak_density(params: &PhysicalParams) -> f64 {
    MASS * params.omega_b / (2.0 * PI * HBAR)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ChargeSign;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn poly_eval_and_derivative() {
        let p = HolomorphicPoly::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(2.0, -1.0)]).unwrap();
        let z = c(0.3, 0.7);
        assert!((p.eval(z) - (c(1.0, 0.0) + c(2.0, -1.0) * z * z)).norm() < 1e-15);
        assert!((p.derivative().eval(z) - c(4.0, -2.0) * z).norm() < 1e-15);
        assert_eq!(p.degree(), 2);
        assert!(HolomorphicPoly::new(vec![c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn ground_state_matches_gaussian() {
        let p = PhysicalParams::default();
        let g = GridSpec::square(128, 8.0).unwrap();
        let psi = ground_state(g, &p).unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        let peak = psi.values[[64, 64]];
        assert!((peak.norm_sqr() - ground_peak_density(&p)).abs() < 1e-10);
    }

    #[test]
    fn excited_state_is_power_of_zbar() {
        let p = PhysicalParams::new(ChargeSign::Negative, 1.0).unwrap();
        let g = GridSpec::square(64, 8.0).unwrap();
        let psi = number_wavefunction(3, &HolomorphicPoly::one(), g, &p).unwrap();
        let direct = GridField::from_fn(g, |x, y| {
            let z = z_coordinate(x, y, &p);
            z.conj().powu(3) * (-z.norm_sqr()).exp()
        })
        .normalized()
        .unwrap();
        assert!(psi.max_abs_diff(&direct) < 1e-12);
    }

    #[test]
    fn too_small_grid_rejected() {
        let p = PhysicalParams::default();
        let g = GridSpec::square(64, 3.0).unwrap();
        assert!(matches!(
            ground_state(g, &p),
            Err(Error::BoundaryViolation { .. })
        ));
    }
}
