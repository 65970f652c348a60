//! Hermite polynomials of complex argument and terminating Gauss
//! hypergeometric sums.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Physicists' Hermite polynomial `H_n(z)` by the three-term recurrence
/// `H_{k+1} = 2 z H_k - 2 k H_{k-1}`.
pub fn hermite_poly(n: u32, z: Complex64) -> Complex64 {
    let mut prev = Complex64::new(1.0, 0.0);
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * z;
    for k in 1..n {
        let next = 2.0 * z * cur - 2.0 * f64::from(k) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Returns `Some(m)` when `x == -m` for a non-negative integer `m`.
fn non_positive_integer(x: f64) -> Option<u32> {
    if x <= 0.0 && x.fract() == 0.0 && x >= -(u32::MAX as f64) {
        Some((-x) as u32)
    } else {
        None
    }
}

/// `2F1(a, b; c; z)` for parameter sets where `a` or `b` is a non-positive
/// integer, so the series is a polynomial in `z`.
pub fn hyp2f1_terminating(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let terms = match (non_positive_integer(a), non_positive_integer(b)) {
        (Some(m), Some(n)) => m.min(n),
        (Some(m), None) | (None, Some(m)) => m,
        (None, None) => return Err(Error::NonTerminatingSeries { a, b, c }),
    };
    if let Some(pole) = non_positive_integer(c) {
        if pole < terms {
            return Err(Error::InvalidArgument(format!(
                "2F1 denominator parameter c = {c} hits zero before the series terminates"
            )));
        }
    }
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 0..terms {
        let kf = f64::from(k);
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
    }
    Ok(sum)
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// `Gamma(m + 1/2) / Gamma(1/2) = (2m)! / (4^m m!)`.
pub(crate) fn half_gamma_ratio(m: u32) -> f64 {
    (1..=m).fold(1.0, |acc, j| acc * (f64::from(j) - 0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hermite_low_orders() {
        assert_eq!(hermite_poly(0, c(3.0, -1.0)), c(1.0, 0.0));
        assert_eq!(hermite_poly(1, c(2.0, 1.0)), c(4.0, 2.0));
        assert!((hermite_poly(3, c(0.5, 0.0)) - c(-5.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn hermite_matches_explicit_forms() {
        // H4 = 16 z^4 - 48 z^2 + 12, H5 = 32 z^5 - 160 z^3 + 120 z
        for z in [c(0.3, -0.7), c(-1.2, 0.4), c(2.0, 2.0)] {
            let h4 = 16.0 * z.powi(4) - 48.0 * z.powi(2) + 12.0;
            let h5 = 32.0 * z.powi(5) - 160.0 * z.powi(3) + 120.0 * z;
            assert!((hermite_poly(4, z) - h4).norm() < 1e-10 * h4.norm().max(1.0));
            assert!((hermite_poly(5, z) - h5).norm() < 1e-10 * h5.norm().max(1.0));
        }
    }

    #[test]
    fn hyp2f1_small_cases() {
        assert_eq!(hyp2f1_terminating(0.0, 0.7, 1.3, 0.9).unwrap(), 1.0);
        let (b, cc, z) = (0.7, 1.3, 0.45);
        let v = hyp2f1_terminating(-1.0, b, cc, z).unwrap();
        assert!((v - (1.0 - b * z / cc)).abs() < 1e-15);
        // term by term: 1 - 0.2 + 0.018
        let v = hyp2f1_terminating(-2.0, 0.5, 1.5, 0.3).unwrap();
        assert!((v - 0.818).abs() < 1e-12);
    }

    #[test]
    fn hyp2f1_terminates_through_b() {
        let v = hyp2f1_terminating(0.5, -1.0, 0.5, 0.2).unwrap();
        assert!((v - (1.0 - 0.2)).abs() < 1e-15);
    }

    #[test]
    fn hyp2f1_rejects_infinite_series() {
        assert!(matches!(
            hyp2f1_terminating(0.5, 0.25, 1.5, 0.1),
            Err(Error::NonTerminatingSeries { .. })
        ));
        assert!(hyp2f1_terminating(-3.0, 1.0, -1.0, 0.1).is_err());
    }

    #[test]
    fn combinatorics() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(half_gamma_ratio(0), 1.0);
        // Gamma(5/2)/Gamma(1/2) = 3/4
        assert_eq!(half_gamma_ratio(2), 0.75);
    }
}
