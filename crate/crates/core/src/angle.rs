use std::f64::consts::{PI, TAU};

/// Maps an angle into the canonical interval `(-pi, pi]`.
pub fn wrap(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Distance on the circle, in `[0, pi]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_representatives() {
        assert_eq!(wrap(-PI), PI);
        assert_eq!(wrap(PI), PI);
        assert_eq!(wrap(0.0), 0.0);
        assert!((wrap(3.0 * PI) - PI).abs() < 1e-15);
        assert!((wrap(TAU + 0.25) - 0.25).abs() < 1e-15);
        assert!(circular_distance(PI - 1e-13, -PI + 1e-13) < 1e-12);
    }

    proptest! {
        #[test]
        fn wrap_lands_in_interval(x in -1e4f64..1e4) {
            let w = wrap(x);
            prop_assert!(w > -PI && w <= PI);
            prop_assert!(circular_distance(w, x) < 1e-9);
        }
    }
}
