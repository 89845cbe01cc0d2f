//! Initial-state families: number states, superpositions, displaced number
//! states, coherent states and seeded random states.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::fock::{max_abs_diff, Mode};
use crate::params::FockTruncation;
use crate::state::TwoModeState;

/// Declarative description of an initial state. Complex numbers serialize as
/// `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    #[serde(flatten)]
    pub kind: StateKind,
    /// Optional guiding-center displacement `exp(beta b^dag - beta* b)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_shift: Option<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateKind {
    Number {
        n: usize,
        #[serde(default)]
        n_prime: usize,
    },
    Superposition {
        terms: Vec<(usize, usize, C64)>,
    },
    DisplacedNumber {
        n: usize,
        alpha: C64,
    },
    Coherent {
        alpha: C64,
    },
    Random {
        seed: u64,
        n_max: usize,
    },
}

impl StateSpec {
    pub fn new(kind: StateKind) -> Self {
        StateSpec {
            kind,
            b_shift: None,
        }
    }

    pub fn number(n: usize, n_prime: usize) -> Self {
        Self::new(StateKind::Number { n, n_prime })
    }

    pub fn displaced_number(n: usize, alpha: C64) -> Self {
        Self::new(StateKind::DisplacedNumber { n, alpha })
    }

    pub fn coherent(alpha: C64) -> Self {
        Self::new(StateKind::Coherent { alpha })
    }

    pub fn superposition(terms: Vec<(usize, usize, C64)>) -> Self {
        Self::new(StateKind::Superposition { terms })
    }

    pub fn random(seed: u64, n_max: usize) -> Self {
        Self::new(StateKind::Random { seed, n_max })
    }

    pub fn with_b_shift(mut self, beta: C64) -> Self {
        self.b_shift = Some(beta);
        self
    }
}

/// Levels needed to hold `D(alpha)|n>` without visible truncation error.
pub fn required_levels(n: usize, alpha: C64) -> f64 {
    let r = alpha.norm();
    n as f64 + r * r + 6.0 * r + 10.0
}

fn check_adequacy(n: usize, alpha: C64, n_max: usize, mode: Mode) -> Result<()> {
    if alpha == C64::new(0.0, 0.0) {
        return Ok(());
    }
    let need = required_levels(n, alpha);
    if need > n_max as f64 {
        return Err(Error::TruncationInadequate(format!(
            "displacing level {n} of mode {mode} by |alpha| = {:.4} needs n_max >= {need:.2}, have {n_max}",
            alpha.norm()
        )));
    }
    Ok(())
}

/// `D(alpha) = exp(alpha c^dag - alpha* c)` on a single mode's truncated basis.
#[derive(Debug, Clone)]
pub struct DisplacementMatrix {
    pub entries: Array2<C64>,
    pub alpha: C64,
    pub mode: Mode,
}

impl DisplacementMatrix {
    fn build(alpha: C64, levels: usize, mode: Mode) -> Self {
        let mut gen = Array2::zeros((levels, levels));
        for n in 1..levels {
            let s = (n as f64).sqrt();
            // <n|c^dag|n-1> = sqrt(n), <n-1|c|n> = sqrt(n)
            gen[[n, n - 1]] += alpha * s;
            gen[[n - 1, n]] -= alpha.conj() * s;
        }
        DisplacementMatrix {
            entries: expm(&gen),
            alpha,
            mode,
        }
    }

    pub fn levels(&self) -> usize {
        self.entries.nrows()
    }

    /// Levels `0..=top` on which the truncated operator is trustworthy: the
    /// largest `n` with `n + |alpha|^2 + 6 |alpha| sqrt(2n + 1) + 10 <= n_max`.
    /// The spread of `D|n>` over levels grows like `|alpha| sqrt(2n + 1)`.
    pub fn safe_top(&self) -> Option<usize> {
        let top = self.levels() - 1;
        if self.alpha == C64::new(0.0, 0.0) {
            return Some(top);
        }
        let r = self.alpha.norm();
        (0..=top)
            .take_while(|&n| {
                let n = n as f64;
                n + r * r + 6.0 * r * (2.0 * n + 1.0).sqrt() + 10.0 <= top as f64
            })
            .last()
    }

    /// `max |D^dag D - I|` on the safe levels.
    pub fn unitarity_defect(&self) -> f64 {
        let Some(top) = self.safe_top() else {
            return f64::INFINITY;
        };
        let d = &self.entries;
        let prod = d.t().mapv(|z| z.conj()).dot(d);
        let sub = prod.slice(ndarray::s![..=top, ..=top]).to_owned();
        max_abs_diff(&sub, &Array2::from_diag_elem(top + 1, C64::new(1.0, 0.0)))
    }

    /// Applies the displacement to its mode of a two-mode state.
    pub fn apply(&self, state: &TwoModeState) -> Result<TwoModeState> {
        let trunc = state.trunc();
        let amps = match self.mode {
            Mode::A => {
                if self.levels() != trunc.levels_a() {
                    return Err(Error::DimensionMismatch {
                        expected: trunc.levels_a(),
                        got: self.levels(),
                    });
                }
                check_adequacy(state.top_level_a(1e-14), self.alpha, trunc.n_max_a, Mode::A)?;
                self.entries.dot(state.amps())
            }
            Mode::B => {
                if self.levels() != trunc.levels_b() {
                    return Err(Error::DimensionMismatch {
                        expected: trunc.levels_b(),
                        got: self.levels(),
                    });
                }
                check_adequacy(state.top_level_b(1e-14), self.alpha, trunc.n_max_b, Mode::B)?;
                state.amps().dot(&self.entries.t())
            }
        };
        Ok(TwoModeState::from_raw(amps, trunc))
    }
}

/// `D(alpha)` acting on mode a. Fails when the truncation cannot hold a
/// displaced vacuum.
pub fn displacement_matrix(alpha: C64, trunc: FockTruncation) -> Result<DisplacementMatrix> {
    check_adequacy(0, alpha, trunc.n_max_a, Mode::A)?;
    Ok(DisplacementMatrix::build(alpha, trunc.levels_a(), Mode::A))
}

/// `exp(beta b^dag - beta* b)` acting on mode b; moves the orbit center.
pub fn b_shift_matrix(beta: C64, trunc: FockTruncation) -> Result<DisplacementMatrix> {
    check_adequacy(0, beta, trunc.n_max_b, Mode::B)?;
    Ok(DisplacementMatrix::build(beta, trunc.levels_b(), Mode::B))
}

fn number_state(n: usize, n_prime: usize, trunc: FockTruncation) -> Result<TwoModeState> {
    if n > trunc.n_max_a || n_prime > trunc.n_max_b {
        return Err(Error::TruncationInadequate(format!(
            "|{n} {n_prime}> lies outside truncation ({}, {})",
            trunc.n_max_a, trunc.n_max_b
        )));
    }
    let mut amps = Array2::zeros((trunc.levels_a(), trunc.levels_b()));
    amps[[n, n_prime]] = C64::new(1.0, 0.0);
    Ok(TwoModeState::from_raw(amps, trunc))
}

fn displaced_number(n: usize, alpha: C64, trunc: FockTruncation) -> Result<TwoModeState> {
    check_adequacy(n, alpha, trunc.n_max_a, Mode::A)?;
    let base = number_state(n, 0, trunc)?;
    if alpha == C64::new(0.0, 0.0) {
        return Ok(base);
    }
    DisplacementMatrix::build(alpha, trunc.levels_a(), Mode::A).apply(&base)
}

fn random_state(seed: u64, n_max: usize, trunc: FockTruncation) -> Result<TwoModeState> {
    if n_max > trunc.n_max_a {
        return Err(Error::TruncationInadequate(format!(
            "random state up to level {n_max} exceeds n_max_a = {}",
            trunc.n_max_a
        )));
    }
    let top_b = n_max.min(trunc.n_max_b);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amps = Array2::zeros((trunc.levels_a(), trunc.levels_b()));
    for n in 0..=n_max {
        for np in 0..=top_b {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            amps[[n, np]] = C64::new(re, im);
        }
    }
    TwoModeState::from_amplitudes(amps, trunc)
}

/// Builds the normalized state described by `spec`.
pub fn make_state(spec: &StateSpec, trunc: FockTruncation) -> Result<TwoModeState> {
    trunc.validate()?;
    let state = match &spec.kind {
        StateKind::Number { n, n_prime } => number_state(*n, *n_prime, trunc)?,
        StateKind::Superposition { terms } => {
            if terms.is_empty() {
                return Err(Error::EmptySpec);
            }
            let mut amps = Array2::zeros((trunc.levels_a(), trunc.levels_b()));
            for &(n, np, w) in terms {
                if n > trunc.n_max_a || np > trunc.n_max_b {
                    return Err(Error::TruncationInadequate(format!(
                        "superposition term |{n} {np}> lies outside the truncation"
                    )));
                }
                amps[[n, np]] += w;
            }
            TwoModeState::from_amplitudes(amps, trunc)?
        }
        StateKind::DisplacedNumber { n, alpha } => displaced_number(*n, *alpha, trunc)?,
        StateKind::Coherent { alpha } => displaced_number(0, *alpha, trunc)?,
        StateKind::Random { seed, n_max } => random_state(*seed, *n_max, trunc)?,
    };
    match spec.b_shift {
        Some(beta) if beta != C64::new(0.0, 0.0) => b_shift_matrix(beta, trunc)?.apply(&state),
        _ => Ok(state),
    }
}

/// `<c>` for the lowering operator of `mode`, evaluated directly on the amplitudes.
pub fn ladder_mean(state: &TwoModeState, mode: Mode) -> C64 {
    let c = state.amps();
    let (la, lb) = c.dim();
    let mut acc = C64::new(0.0, 0.0);
    for n in 0..la {
        for np in 0..lb {
            acc += match mode {
                Mode::A if n > 0 => c[[n - 1, np]].conj() * c[[n, np]] * (n as f64).sqrt(),
                Mode::B if np > 0 => c[[n, np - 1]].conj() * c[[n, np]] * (np as f64).sqrt(),
                _ => C64::new(0.0, 0.0),
            };
        }
    }
    acc
}

/// `<a^dag a>`.
pub fn mean_number_a(state: &TwoModeState) -> f64 {
    state
        .amps()
        .outer_iter()
        .enumerate()
        .map(|(n, row)| n as f64 * row.iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderMoments {
    pub mean_a: C64,
    pub delta_a_sq: f64,
}

/// `<a>` and `(Delta a)^2 = <a^dag a> - |<a>|^2`; tiny negative round-off is clamped to zero.
pub fn mean_and_variance_a(state: &TwoModeState) -> LadderMoments {
    let mean_a = ladder_mean(state, Mode::A);
    let mut delta_a_sq = mean_number_a(state) - mean_a.norm_sqr();
    if delta_a_sq < 0.0 && delta_a_sq > -1e-12 {
        delta_a_sq = 0.0;
    }
    LadderMoments { mean_a, delta_a_sq }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_ladder, expectation};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_displacement_is_identity() {
        let t = FockTruncation::new(12, 0).unwrap();
        let d = displacement_matrix(c(0.0, 0.0), t).unwrap();
        assert_eq!(
            max_abs_diff(&d.entries, &Array2::from_diag_elem(13, c(1.0, 0.0))),
            0.0
        );
    }

    #[test]
    fn vacuum_overlap_matches_series() {
        let t = FockTruncation::new(40, 0).unwrap();
        let d = displacement_matrix(c(1.0, 0.0), t).unwrap();
        // independent route: Taylor series of exp(a^dag - a) applied to |0>,
        // accumulated with exact ladder arithmetic on a wider basis
        let mut vec = vec![c(0.0, 0.0); 80];
        vec[0] = c(1.0, 0.0);
        let mut term = vec.clone();
        for k in 1..200 {
            let mut next = vec![c(0.0, 0.0); 80];
            for (n, amp) in term.iter().enumerate() {
                if n + 1 < 80 {
                    next[n + 1] += amp * ((n + 1) as f64).sqrt();
                }
                if n > 0 {
                    next[n - 1] -= amp * (n as f64).sqrt();
                }
            }
            term = next.into_iter().map(|z| z / k as f64).collect();
            for (v, t) in vec.iter_mut().zip(&term) {
                *v += t;
            }
        }
        let expected = (-0.5f64).exp();
        assert!((vec[0].re - expected).abs() < 1e-12);
        assert!((d.entries[[0, 0]].re - expected).abs() < 1e-12);
        assert!((d.entries[[0, 0]].re - 0.606_531).abs() < 1e-6);
    }

    #[test]
    fn displacement_shifts_lowering_operator() {
        let alpha = c(0.7, 0.3);
        let t = FockTruncation::new(40, 0).unwrap();
        let d = displacement_matrix(alpha, t).unwrap();
        let a = build_ladder(Mode::A, t).entries;
        let dd = d.entries.t().mapv(|z| z.conj());
        let lhs = dd.dot(&a).dot(&d.entries);
        let top = d.safe_top().unwrap();
        let mut rhs = a.clone();
        for i in 0..=top {
            rhs[[i, i]] += alpha;
        }
        let s = ndarray::s![..=top, ..=top];
        assert!(max_abs_diff(&lhs.slice(s).to_owned(), &rhs.slice(s).to_owned()) < 1e-8);
        assert!(d.unitarity_defect() < 1e-8);
    }

    #[test]
    fn composition_with_inverse() {
        let t = FockTruncation::new(48, 0).unwrap();
        let alpha = c(-1.1, 0.9);
        let d = displacement_matrix(alpha, t).unwrap();
        let dm = displacement_matrix(-alpha, t).unwrap();
        let top = d.safe_top().unwrap();
        let prod = d.entries.dot(&dm.entries);
        let s = ndarray::s![..=top, ..=top];
        let eye = Array2::from_diag_elem(top + 1, c(1.0, 0.0));
        assert!(max_abs_diff(&prod.slice(s).to_owned(), &eye) < 1e-8);
    }

    #[test]
    fn inadequate_truncation_rejected() {
        let t = FockTruncation::new(12, 0).unwrap();
        assert!(matches!(
            displacement_matrix(c(1.0, 0.0), t),
            Err(Error::TruncationInadequate(_))
        ));
        let spec = StateSpec::displaced_number(3, c(0.0, 0.0));
        assert!(make_state(&spec, FockTruncation::new(2, 0).unwrap()).is_err());
    }

    #[test]
    fn number_state_amplitude() {
        let t = FockTruncation::new(4, 1).unwrap();
        let s = make_state(&StateSpec::number(2, 0), t).unwrap();
        for ((n, np), z) in s.amps().indexed_iter() {
            let want = if (n, np) == (2, 0) { 1.0 } else { 0.0 };
            assert_eq!(*z, c(want, 0.0));
        }
    }

    #[test]
    fn coherent_state_is_poisson() {
        let alpha = c(0.8, -0.6);
        let t = FockTruncation::new(40, 0).unwrap();
        let s = make_state(&StateSpec::displaced_number(0, alpha), t).unwrap();
        let mut fact = 1.0;
        for n in 0..25 {
            if n > 0 {
                fact *= n as f64;
            }
            let want = (-alpha.norm_sqr()).exp() * alpha.norm_sqr().powi(n as i32) / fact;
            assert!((s.amp(n, 0).norm_sqr() - want).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn displaced_number_moments() {
        let t = FockTruncation::new(60, 0).unwrap();
        for n in 0..4 {
            let alpha = c(1.0, 1.0);
            let s = make_state(&StateSpec::displaced_number(n, alpha), t).unwrap();
            let m = mean_and_variance_a(&s);
            assert!((m.mean_a - alpha).norm() < 1e-10);
            assert!((mean_number_a(&s) - (n as f64 + 2.0)).abs() < 1e-10);
            assert!((m.delta_a_sq - n as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn moments_of_number_and_superposition() {
        let t = FockTruncation::new(6, 0).unwrap();
        let s = make_state(&StateSpec::number(4, 0), t).unwrap();
        let m = mean_and_variance_a(&s);
        assert_eq!(m.mean_a, c(0.0, 0.0));
        assert_eq!(m.delta_a_sq, 4.0);

        let s = make_state(
            &StateSpec::superposition(vec![(0, 0, c(1.0, 0.0)), (1, 0, c(1.0, 0.0))]),
            t,
        )
        .unwrap();
        let m = mean_and_variance_a(&s);
        assert!((m.mean_a - c(0.5, 0.0)).norm() < 1e-15);
        assert!((m.delta_a_sq - 0.25).abs() < 1e-15);
        // agrees with the matrix route
        let a = build_ladder(Mode::A, t);
        assert!((expectation(&a, &s).unwrap() - m.mean_a).norm() < 1e-15);
    }

    #[test]
    fn random_state_is_deterministic() {
        let t = FockTruncation::new(10, 3).unwrap();
        let a = make_state(&StateSpec::random(7, 8), t).unwrap();
        let b = make_state(&StateSpec::random(7, 8), t).unwrap();
        let other = make_state(&StateSpec::random(8, 8), t).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, other);
        assert!((a.norm_sqr() - 1.0).abs() < 1e-14);
        assert_eq!(a.top_level_a(0.0), 8);
    }

    #[test]
    fn empty_superposition_rejected() {
        let t = FockTruncation::new(3, 0).unwrap();
        assert!(matches!(
            make_state(&StateSpec::superposition(vec![]), t),
            Err(Error::EmptySpec)
        ));
        let zero = StateSpec::superposition(vec![(1, 0, c(0.0, 0.0))]);
        assert!(matches!(make_state(&zero, t), Err(Error::EmptySpec)));
    }

    #[test]
    fn b_shift_moves_b_mean_only() {
        let t = FockTruncation::new(30, 24).unwrap();
        let beta = c(0.4, -0.5);
        let spec = StateSpec::coherent(c(1.0, 0.0)).with_b_shift(beta);
        let s = make_state(&spec, t).unwrap();
        assert!((ladder_mean(&s, Mode::B) - beta).norm() < 1e-10);
        assert!((ladder_mean(&s, Mode::A) - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn spec_json_shape() {
        let spec = StateSpec::displaced_number(1, c(0.8, 0.0)).with_b_shift(c(0.1, 0.2));
        let js = serde_json::to_string(&spec).unwrap();
        assert_eq!(
            js,
            r#"{"kind":"displaced_number","n":1,"alpha":[0.8,0.0],"b_shift":[0.1,0.2]}"#
        );
        let back: StateSpec = serde_json::from_str(&js).unwrap();
        assert_eq!(back, spec);
        let num: StateSpec = serde_json::from_str(r#"{"kind":"number","n":2}"#).unwrap();
        assert_eq!(num, StateSpec::number(2, 0));
    }
}
