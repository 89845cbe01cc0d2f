//! Operators on the truncated two-mode Fock space.
//!
//! The cyclotron mode `a` carries the Landau level index `n`; the guiding
//! center mode `b` carries the degeneracy index `n'`. Cartesian operators are
//! reassembled from `a1 = (a + b)/sqrt2`, `a2 = -i eps (a - b)/sqrt2`.
//!
//! Truncation breaks the ladder algebra at the top level of each mode, so any
//! identity involving products of ladder operators only holds on a
//! [`SafeSubspace`] that drops the highest one or two levels.

use std::fmt;

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::params::{FockTruncation, PhysicalParams, HBAR, MASS};
use crate::state::TwoModeState;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    A,
    B,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::A => write!(f, "a"),
            Mode::B => write!(f, "b"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub entries: Array2<C64>,
    pub label: String,
    /// Set when the operator is Hermitian by construction.
    pub hermitian: bool,
}

impl OperatorMatrix {
    pub fn new(entries: Array2<C64>, label: impl Into<String>) -> Self {
        OperatorMatrix {
            entries,
            label: label.into(),
            hermitian: false,
        }
    }

    /// Symmetrizes `(M + M^dag)/2` and marks the result Hermitian.
    pub fn hermitian(entries: Array2<C64>, label: impl Into<String>) -> Self {
        let sym = (&entries + &entries.t().mapv(|c| c.conj())).mapv(|c| c * 0.5);
        OperatorMatrix {
            entries: sym,
            label: label.into(),
            hermitian: true,
        }
    }

    pub fn identity(dim: usize) -> Self {
        OperatorMatrix {
            entries: Array2::from_diag_elem(dim, C64::new(1.0, 0.0)),
            label: "I".into(),
            hermitian: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn adjoint(&self) -> Self {
        OperatorMatrix {
            entries: self.entries.t().mapv(|c| c.conj()),
            label: format!("{}^dag", self.label),
            hermitian: self.hermitian,
        }
    }

    pub fn matmul(&self, rhs: &OperatorMatrix) -> Self {
        OperatorMatrix::new(
            self.entries.dot(&rhs.entries),
            format!("{} {}", self.label, rhs.label),
        )
    }

    pub fn commutator(&self, rhs: &OperatorMatrix) -> Self {
        let ab = self.entries.dot(&rhs.entries);
        let ba = rhs.entries.dot(&self.entries);
        OperatorMatrix::new(ab - ba, format!("[{}, {}]", self.label, rhs.label))
    }

    /// Largest entry magnitude of `M - M^dag`.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs_diff(&self.entries, &self.entries.t().mapv(|c| c.conj()))
    }

    /// Principal submatrix on the given basis indices.
    pub fn restrict(&self, indices: &[usize]) -> Array2<C64> {
        Array2::from_shape_fn((indices.len(), indices.len()), |(i, j)| {
            self.entries[[indices[i], indices[j]]]
        })
    }

    pub fn apply(&self, state: &TwoModeState) -> Result<Vec<C64>> {
        if self.dim() != state.trunc().dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: state.trunc().dim(),
            });
        }
        let v = ndarray::ArrayView1::from(state.as_slice());
        Ok(self.entries.dot(&v).to_vec())
    }
}

/// Basis indices with `n <= n_max_a - drop_a` and `n' <= n_max_b - drop_b`.
#[derive(Debug, Clone)]
pub struct SafeSubspace {
    pub indices: Vec<usize>,
}

impl SafeSubspace {
    pub fn new(trunc: FockTruncation, drop_a: usize, drop_b: usize) -> Self {
        let top_a = trunc.n_max_a.checked_sub(drop_a);
        let top_b = trunc.n_max_b.checked_sub(drop_b);
        let indices = match (top_a, top_b) {
            (Some(ta), Some(tb)) => (0..=ta)
                .flat_map(|n| (0..=tb).map(move |np| (n, np)))
                .map(|(n, np)| trunc.index(n, np))
                .collect(),
            _ => Vec::new(),
        };
        SafeSubspace { indices }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Max-norm distance between two operators restricted to this subspace.
    pub fn distance(&self, lhs: &OperatorMatrix, rhs: &OperatorMatrix) -> f64 {
        max_abs_diff(&lhs.restrict(&self.indices), &rhs.restrict(&self.indices))
    }

    /// Max-norm distance between `op` and `scale * I` on this subspace.
    pub fn distance_to_identity(&self, op: &OperatorMatrix, scale: C64) -> f64 {
        let sub = op.restrict(&self.indices);
        let eye = Array2::from_diag_elem(self.len(), scale);
        max_abs_diff(&sub, &eye)
    }
}

pub fn max_abs_diff(lhs: &Array2<C64>, rhs: &Array2<C64>) -> f64 {
    lhs.iter()
        .zip(rhs.iter())
        .map(|(l, r)| (l - r).norm())
        .fold(0.0, f64::max)
}

/// Lowering operator on `mode`, identity on the other mode.
pub fn build_ladder(mode: Mode, trunc: FockTruncation) -> OperatorMatrix {
    let dim = trunc.dim();
    let mut m = Array2::zeros((dim, dim));
    for n in 0..trunc.levels_a() {
        for np in 0..trunc.levels_b() {
            let col = trunc.index(n, np);
            match mode {
                Mode::A if n > 0 => {
                    m[[trunc.index(n - 1, np), col]] = C64::new((n as f64).sqrt(), 0.0)
                }
                Mode::B if np > 0 => {
                    m[[trunc.index(n, np - 1), col]] = C64::new((np as f64).sqrt(), 0.0)
                }
                _ => {}
            }
        }
    }
    OperatorMatrix::new(m, mode.to_string())
}

fn diagonal(trunc: FockTruncation, label: &str, f: impl Fn(usize, usize) -> f64) -> OperatorMatrix {
    let dim = trunc.dim();
    let mut m = Array2::zeros((dim, dim));
    for idx in 0..dim {
        let (n, np) = trunc.levels_of(idx);
        m[[idx, idx]] = C64::new(f(n, np), 0.0);
    }
    OperatorMatrix {
        entries: m,
        label: label.into(),
        hermitian: true,
    }
}

/// Number operator `N = a^dag a` or `N' = b^dag b`.
pub fn build_number(mode: Mode, trunc: FockTruncation) -> OperatorMatrix {
    match mode {
        Mode::A => diagonal(trunc, "N", |n, _| n as f64),
        Mode::B => diagonal(trunc, "N'", |_, np| np as f64),
    }
}

/// `H = hbar omega_B (a^dag a + 1/2)`.
pub fn build_hamiltonian(params: &PhysicalParams, trunc: FockTruncation) -> OperatorMatrix {
    let w = params.omega_b;
    diagonal(trunc, "H", |n, _| HBAR * w * (n as f64 + 0.5))
}

/// `L_z = eps hbar (b^dag b - a^dag a)`.
pub fn build_angular_momentum(params: &PhysicalParams, trunc: FockTruncation) -> OperatorMatrix {
    let eps = params.eps();
    diagonal(trunc, "L_z", |n, np| eps * HBAR * (np as f64 - n as f64))
}

#[derive(Debug, Clone)]
pub struct PhaseSpaceOperators {
    pub x: OperatorMatrix,
    pub y: OperatorMatrix,
    pub p_x: OperatorMatrix,
    pub p_y: OperatorMatrix,
}

/// Cartesian position and momentum rebuilt from the two ladder modes.
pub fn build_position_momentum(
    params: &PhysicalParams,
    trunc: FockTruncation,
) -> PhaseSpaceOperators {
    let a = build_ladder(Mode::A, trunc).entries;
    let b = build_ladder(Mode::B, trunc).entries;
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let eps = params.eps();

    let a1 = (&a + &b).mapv(|c| c * r2);
    let a2 = (&a - &b).mapv(|c| c * (-I * eps * r2));
    let dag = |m: &Array2<C64>| m.t().mapv(|c| c.conj());

    let len = params.magnetic_length();
    let pscale = HBAR / (2.0 * len);

    let x = (&a1 + &dag(&a1)).mapv(|c| c * len);
    let y = (&a2 + &dag(&a2)).mapv(|c| c * len);
    let p_x = (&a1 - &dag(&a1)).mapv(|c| c * (-I * pscale));
    let p_y = (&a2 - &dag(&a2)).mapv(|c| c * (-I * pscale));

    PhaseSpaceOperators {
        x: OperatorMatrix::hermitian(x, "x"),
        y: OperatorMatrix::hermitian(y, "y"),
        p_x: OperatorMatrix::hermitian(p_x, "p_x"),
        p_y: OperatorMatrix::hermitian(p_y, "p_y"),
    }
}

/// Symmetric-gauge Hamiltonian assembled from Cartesian operators:
/// `(p_x^2 + p_y^2)/2M + M omega^2 (x^2 + y^2)/8 - (eps omega/2)(x p_y - y p_x)`.
pub fn symmetric_gauge_hamiltonian(
    params: &PhysicalParams,
    ops: &PhaseSpaceOperators,
) -> OperatorMatrix {
    let w = params.omega_b;
    let sq = |m: &OperatorMatrix| m.entries.dot(&m.entries);
    let kinetic = (sq(&ops.p_x) + sq(&ops.p_y)).mapv(|c| c / (2.0 * MASS));
    let trap = (sq(&ops.x) + sq(&ops.y)).mapv(|c| c * (MASS * w * w / 8.0));
    let lz = canonical_angular_momentum(ops).entries;
    let h = kinetic + trap - lz.mapv(|c| c * (0.5 * params.eps() * w));
    OperatorMatrix::hermitian(h, "H_gauge")
}

/// `x p_y - y p_x`.
pub fn canonical_angular_momentum(ops: &PhaseSpaceOperators) -> OperatorMatrix {
    let lz = ops.x.entries.dot(&ops.p_y.entries) - ops.y.entries.dot(&ops.p_x.entries);
    OperatorMatrix::hermitian(lz, "x p_y - y p_x")
}

/// `<psi|Op|psi>`.
pub fn expectation(op: &OperatorMatrix, state: &TwoModeState) -> Result<C64> {
    let applied = op.apply(state)?;
    Ok(state
        .as_slice()
        .iter()
        .zip(&applied)
        .map(|(l, r)| l.conj() * r)
        .sum())
}

/// Expectation of a Hermitian operator. The imaginary residual must stay
/// below `1e-10` relative to the operator scale.
pub fn expectation_real(op: &OperatorMatrix, state: &TwoModeState) -> Result<f64> {
    let v = expectation(op, state)?;
    if op.hermitian && v.im.abs() > 1e-10 * v.re.abs().max(1.0) {
        return Err(Error::InvalidParams(format!(
            "expectation of Hermitian {} has imaginary part {:e}",
            op.label, v.im
        )));
    }
    Ok(v.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ChargeSign;

    fn params(eps: ChargeSign) -> PhysicalParams {
        PhysicalParams::new(eps, 1.0).unwrap()
    }

    fn basis(trunc: FockTruncation, n: usize, np: usize) -> TwoModeState {
        let mut amps = Array2::zeros((trunc.levels_a(), trunc.levels_b()));
        amps[[n, np]] = C64::new(1.0, 0.0);
        TwoModeState::from_amplitudes(amps, trunc).unwrap()
    }

    #[test]
    fn lowering_annihilates_vacuum() {
        let t = FockTruncation::new(5, 3).unwrap();
        let a = build_ladder(Mode::A, t);
        let out = a.apply(&TwoModeState::vacuum(t)).unwrap();
        assert!(out.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn commutators_on_safe_subspace() {
        let t = FockTruncation::new(6, 5).unwrap();
        let a = build_ladder(Mode::A, t);
        let b = build_ladder(Mode::B, t);
        let safe = SafeSubspace::new(t, 1, 1);
        let one = C64::new(1.0, 0.0);
        assert!(safe.distance_to_identity(&a.commutator(&a.adjoint()), one) < 1e-12);
        assert!(safe.distance_to_identity(&b.commutator(&b.adjoint()), one) < 1e-12);
        // cross commutators vanish exactly, even without restriction
        for c in [
            a.commutator(&b),
            a.commutator(&b.adjoint()),
            a.adjoint().commutator(&b),
        ] {
            assert_eq!(c.entries.iter().map(|z| z.norm()).fold(0.0, f64::max), 0.0);
        }
    }

    #[test]
    fn hamiltonian_spectrum() {
        let t = FockTruncation::new(4, 0).unwrap();
        let h = build_hamiltonian(&params(ChargeSign::Positive), t);
        let diag: Vec<f64> = h.entries.diag().iter().map(|c| c.re).collect();
        assert_eq!(diag, vec![0.5, 1.5, 2.5, 3.5, 4.5]);
    }

    #[test]
    fn hamiltonian_expectation_in_superposition() {
        let t = FockTruncation::new(4, 0).unwrap();
        let mut amps = Array2::zeros((5, 1));
        amps[[0, 0]] = C64::new(1.0, 0.0);
        amps[[2, 0]] = C64::new(1.0, 0.0);
        let s = TwoModeState::from_amplitudes(amps, t).unwrap();
        let h = build_hamiltonian(&params(ChargeSign::Positive), t);
        assert!((expectation_real(&h, &s).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn angular_momentum_eigenvalues() {
        let t = FockTruncation::new(3, 3).unwrap();
        let lp = build_angular_momentum(&params(ChargeSign::Positive), t);
        let ln = build_angular_momentum(&params(ChargeSign::Negative), t);
        assert_eq!(expectation_real(&lp, &basis(t, 0, 0)).unwrap(), 0.0);
        assert_eq!(expectation_real(&lp, &basis(t, 1, 0)).unwrap(), -1.0);
        assert_eq!(expectation_real(&ln, &basis(t, 0, 3)).unwrap(), -3.0);
    }

    #[test]
    fn canonical_commutator() {
        let t = FockTruncation::new(8, 8).unwrap();
        for eps in [ChargeSign::Positive, ChargeSign::Negative] {
            let ops = build_position_momentum(&params(eps), t);
            let safe = SafeSubspace::new(t, 2, 2);
            assert!(safe.distance_to_identity(&ops.x.commutator(&ops.p_x), I) < 1e-12);
            assert!(safe.distance_to_identity(&ops.y.commutator(&ops.p_y), I) < 1e-12);
            assert!(
                safe.distance_to_identity(&ops.x.commutator(&ops.p_y), C64::new(0.0, 0.0)) < 1e-12
            );
            assert!(
                safe.distance_to_identity(&ops.x.commutator(&ops.y), C64::new(0.0, 0.0)) < 1e-12
            );
        }
    }

    #[test]
    fn gauge_hamiltonian_matches_ladder_form() {
        let t = FockTruncation::new(7, 6).unwrap();
        for (eps, w) in [(ChargeSign::Positive, 1.0), (ChargeSign::Negative, 2.5)] {
            let p = PhysicalParams::new(eps, w).unwrap();
            let ops = build_position_momentum(&p, t);
            let safe = SafeSubspace::new(t, 2, 2);
            let h1 = symmetric_gauge_hamiltonian(&p, &ops);
            let h6 = build_hamiltonian(&p, t);
            assert!(safe.distance(&h1, &h6) < 1e-10);
            let lz = canonical_angular_momentum(&ops);
            assert!(safe.distance(&lz, &build_angular_momentum(&p, t)) < 1e-10);
        }
    }

    #[test]
    fn number_states_are_centered() {
        let t = FockTruncation::new(4, 4).unwrap();
        let ops = build_position_momentum(&params(ChargeSign::Negative), t);
        for (n, np) in [(0, 0), (3, 1), (2, 4)] {
            let s = basis(t, n, np);
            assert_eq!(expectation_real(&ops.x, &s).unwrap(), 0.0);
            assert_eq!(expectation_real(&ops.y, &s).unwrap(), 0.0);
        }
    }

    #[test]
    fn hermitian_operators_exact() {
        let t = FockTruncation::new(5, 4).unwrap();
        let p = params(ChargeSign::Negative);
        let ops = build_position_momentum(&p, t);
        for op in [&ops.x, &ops.y, &ops.p_x, &ops.p_y] {
            assert_eq!(op.hermiticity_defect(), 0.0, "{}", op.label);
        }
        assert_eq!(
            symmetric_gauge_hamiltonian(&p, &ops).hermiticity_defect(),
            0.0
        );
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let t = FockTruncation::new(3, 1).unwrap();
        let h = build_hamiltonian(&params(ChargeSign::Positive), t);
        let other = TwoModeState::vacuum(FockTruncation::new(2, 1).unwrap());
        assert!(matches!(
            expectation(&h, &other),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn number_expectation() {
        let t = FockTruncation::new(4, 2).unwrap();
        let n = build_number(Mode::A, t);
        assert_eq!(expectation_real(&n, &basis(t, 3, 1)).unwrap(), 3.0);
    }
}
