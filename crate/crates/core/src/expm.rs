//! Dense complex matrix exponential (scaling and squaring with a Padé
//! approximant, delegated to `nalgebra`) on `ndarray` storage.

use nalgebra::DMatrix;
use ndarray::Array2;
use num_complex::Complex64 as C64;

/// `exp(a)` for a square complex matrix.
pub fn expm(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return Array2::zeros((0, 0));
    }
    let m = DMatrix::from_fn(n, n, |i, j| a[[i, j]]).exp();
    Array2::from_shape_fn((n, n), |(i, j)| m[(i, j)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::max_abs_diff;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // independent reference: Taylor series with many terms, only used at small norm
    fn taylor(a: &Array2<C64>, terms: usize) -> Array2<C64> {
        let n = a.nrows();
        let mut sum: Array2<C64> = Array2::from_diag_elem(n, C64::new(1.0, 0.0));
        let mut term = sum.clone();
        for k in 1..terms {
            term = term.dot(a).mapv(|z| z / k as f64);
            sum += &term;
        }
        sum
    }

    fn random_matrix(n: usize, scale: f64, seed: u64) -> Array2<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((n, n), |_| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
        })
    }

    #[test]
    fn zero_matrix_gives_identity() {
        let e = expm(&Array2::zeros((4, 4)));
        assert_eq!(e, Array2::from_diag_elem(4, C64::new(1.0, 0.0)));
    }

    #[test]
    fn diagonal_matrix() {
        let d = [C64::new(0.3, 2.0), C64::new(-4.0, 0.5), C64::new(7.0, -3.0)];
        let a = Array2::from_shape_fn(
            (3, 3),
            |(i, j)| if i == j { d[i] } else { C64::new(0.0, 0.0) },
        );
        let e = expm(&a);
        for i in 0..3 {
            assert!((e[[i, i]] - d[i].exp()).norm() < 1e-12 * d[i].exp().norm().max(1.0));
        }
    }

    #[test]
    fn matches_taylor_series() {
        for seed in 0..5 {
            let a = random_matrix(6, 0.4, seed);
            assert!(max_abs_diff(&expm(&a), &taylor(&a, 40)) < 1e-13);
        }
    }

    #[test]
    fn squaring_path_matches_product_of_halves() {
        // norm well above theta so the squaring branch runs; compare with exp(a/8)^8 via Taylor
        let a = random_matrix(5, 6.0, 11);
        let small = taylor(&a.mapv(|z| z / 8.0), 60);
        let mut r = small.clone();
        for _ in 0..3 {
            r = r.dot(&r);
        }
        let e = expm(&a);
        let scale = e.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(max_abs_diff(&e, &r) < 1e-10 * scale);
    }

    #[test]
    fn anti_hermitian_generator_gives_unitary() {
        let h = random_matrix(8, 3.0, 3);
        let ah = (&h - &h.t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
        let u = expm(&ah);
        let prod = u.t().mapv(|z| z.conj()).dot(&u);
        assert!(max_abs_diff(&prod, &Array2::from_diag_elem(8, C64::new(1.0, 0.0))) < 1e-12);
    }
}
