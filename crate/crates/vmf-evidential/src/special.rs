//! Numerically stable special functions for spherical concentration parameters.
//!
//! Everything here is specialized to the 3-sphere normalizer
//! `Z(k) = k / (4 pi sinh k)` and its derivatives, and must stay finite and
//! accurate over `k` from 1e-8 up to 1e6, where naive `sinh` overflows at
//! k ~ 710.

use crate::error::{Error, Result};

/// ln(4 pi), the log surface area of the unit 2-sphere.
pub const LN_4PI: f64 = 2.531_024_246_969_290_7;

/// Direct `sinh` is exact enough below this; above, use k - ln 2 + ln1p(-e^{-2k}).
const LOG_SINH_LARGE: f64 = 20.0;
/// Below this, `log(sinh k)` uses the series `log k + log1p(k^2/6 + k^4/120)`.
const LOG_SINH_SMALL: f64 = 1e-4;
/// Below this, `a3` uses the series `k/3 - k^3/45`.
const A3_SMALL: f64 = 1e-3;
/// Below this, the derivative helpers use their series forms (the direct
/// expressions lose ~k^-2 digits to cancellation).
const DERIV_SMALL: f64 = 1e-2;

fn check_nonneg(k: f64, what: &'static str) -> Result<()> {
    if k.is_nan() {
        return Err(Error::NonFinite(what));
    }
    if k < 0.0 {
        return Err(Error::NegativeConcentration(k));
    }
    Ok(())
}

/// log(sinh k) without overflow for k up to 1e6.
///
/// Returns -inf at k = 0 (the true limit).
pub fn log_sinh(k: f64) -> Result<f64> {
    check_nonneg(k, "log_sinh argument")?;
    Ok(if k < LOG_SINH_SMALL {
        // sinh k = k (1 + k^2/6 + k^4/120 + ...)
        k.ln() + (k * k / 6.0 + k * k * k * k / 120.0).ln_1p()
    } else if k < LOG_SINH_LARGE {
        k.sinh().ln()
    } else {
        k - std::f64::consts::LN_2 + (-(-2.0 * k).exp()).ln_1p()
    })
}

/// log Z(k) for the 3-D vMF normalizer Z(k) = k / (4 pi sinh k).
///
/// At k = 0 returns the continuous uniform-sphere limit -ln(4 pi).
pub fn log_norm_const(k: f64) -> Result<f64> {
    check_nonneg(k, "log_norm_const argument")?;
    if k == 0.0 {
        return Ok(-LN_4PI);
    }
    Ok(k.ln() - LN_4PI - log_sinh(k)?)
}

/// Mean resultant length a3(k) = coth(k) - 1/k, strictly in [0, 1).
///
/// This is both E[mu^T x] under vMF(mu, k) and -d/dk log Z(k).
pub fn a3(k: f64) -> Result<f64> {
    check_nonneg(k, "a3 argument")?;
    Ok(if k < A3_SMALL {
        k / 3.0 - k * k * k / 45.0
    } else {
        1.0 / k.tanh() - 1.0 / k
    })
}

/// Derivative a3'(k) = 1/k^2 - 1/sinh(k)^2.
///
/// Series below the cancellation threshold: 1/3 - k^2/15 + 2k^4/189 - k^6/675.
pub fn a3_prime(k: f64) -> Result<f64> {
    check_nonneg(k, "a3_prime argument")?;
    Ok(if k < DERIV_SMALL {
        let k2 = k * k;
        1.0 / 3.0 - k2 / 15.0 + 2.0 * k2 * k2 / 189.0 - k2 * k2 * k2 / 675.0
    } else if k < LOG_SINH_LARGE {
        let s = k.sinh();
        1.0 / (k * k) - 1.0 / (s * s)
    } else {
        // 1/sinh^2 ~ 4 e^{-2k} is negligible against 1/k^2 for k >= 20
        1.0 / (k * k) - 4.0 * (-2.0 * k).exp()
    })
}

/// Derivative of the vMF entropy H(k) = -log Z(k) - k coth(k) + 1,
/// i.e. H'(k) = -1/k + k/sinh(k)^2.
///
/// Series below the cancellation threshold: -k/3 + k^3/15 - 2k^5/189.
pub fn entropy_prime(k: f64) -> Result<f64> {
    check_nonneg(k, "entropy_prime argument")?;
    Ok(if k == 0.0 {
        0.0
    } else if k < DERIV_SMALL {
        let k2 = k * k;
        -k / 3.0 + k * k2 / 15.0 - 2.0 * k * k2 * k2 / 189.0
    } else if k < LOG_SINH_LARGE {
        let s = k.sinh();
        -1.0 / k + k / (s * s)
    } else {
        -1.0 / k + 4.0 * k * (-2.0 * k).exp()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Expected values frozen from a 50-digit evaluation of the defining
    // expressions (extended precision offline, f64 at runtime).
    const LOG_SINH_1: f64 = 0.16143936157119563;
    const LOG_SINH_1000: f64 = 999.306_852_819_440_1;
    const LOG_Z_1: f64 = -2.6924636085404864;
    const LOG_Z_1000: f64 = -994.9301217874272;
    const A3_2: f64 = 0.537_314_720_727_548;
    const A3_1E4: f64 = 3.3333333311111111e-5;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn log_sinh_reference_points() {
        assert!(rel(log_sinh(1.0).unwrap(), LOG_SINH_1) < 1e-14);
        assert!(rel(log_sinh(1000.0).unwrap(), LOG_SINH_1000) < 1e-14);
    }

    #[test]
    fn log_sinh_matches_log_k_near_zero() {
        for k in [1e-8, 1e-6, 1e-5] {
            let diff = log_sinh(k).unwrap() - k.ln();
            assert!(diff.abs() < 1e-10, "k={k}: diff={diff}");
        }
    }

    #[test]
    fn log_sinh_branches_agree_at_boundaries() {
        // series vs direct at 1e-4
        let series = 1e-4f64.ln() + (1e-8 / 6.0 + 1e-16 / 120.0f64).ln_1p();
        let direct = 1e-4f64.sinh().ln();
        assert!((series - direct).abs() < 1e-12);
        // direct vs asymptotic at 20
        let direct = 20.0f64.sinh().ln();
        let asym = 20.0 - std::f64::consts::LN_2 + (-(-40.0f64).exp()).ln_1p();
        assert!((direct - asym).abs() < 1e-12);
    }

    #[test]
    fn log_norm_const_reference_points() {
        assert_eq!(log_norm_const(0.0).unwrap(), -LN_4PI);
        assert!(rel(log_norm_const(1.0).unwrap(), LOG_Z_1) < 1e-14);
        assert!(rel(log_norm_const(1000.0).unwrap(), LOG_Z_1000) < 1e-14);
    }

    #[test]
    fn a3_reference_points() {
        assert!(rel(a3(2.0).unwrap(), A3_2) < 1e-14);
        assert!(rel(a3(1e-4).unwrap(), A3_1E4) < 1e-12);
        assert!(rel(a3(1e6).unwrap(), 1.0 - 1e-6) < 1e-12);
        assert_eq!(a3(0.0).unwrap(), 0.0);
    }

    #[test]
    fn a3_branches_agree_at_boundary() {
        let k = A3_SMALL;
        let series = k / 3.0 - k * k * k / 45.0;
        let direct = 1.0 / k.tanh() - 1.0 / k;
        assert!((series - direct).abs() < 1e-12);
    }

    #[test]
    fn negative_arguments_rejected() {
        assert!(matches!(
            log_sinh(-1.0),
            Err(Error::NegativeConcentration(_))
        ));
        assert!(matches!(
            log_norm_const(-0.5),
            Err(Error::NegativeConcentration(_))
        ));
        assert!(matches!(a3(-1e-9), Err(Error::NegativeConcentration(_))));
        assert!(log_sinh(f64::NAN).is_err());
    }

    #[test]
    fn finite_and_monotone_over_log_grid() {
        // a3 monotone non-decreasing, everything finite, over 1e4 points.
        let n = 10_000;
        let (lo, hi) = (1e-8f64.ln(), 1e6f64.ln());
        let mut prev_a3 = -1.0;
        for i in 0..n {
            let k = (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp();
            let z = log_norm_const(k).unwrap();
            let a = a3(k).unwrap();
            assert!(z.is_finite(), "log_norm_const not finite at k={k}");
            assert!(a.is_finite(), "a3 not finite at k={k}");
            assert!((0.0..1.0).contains(&a), "a3 out of range at k={k}: {a}");
            assert!(a + 1e-12 >= prev_a3, "a3 not monotone at k={k}");
            prev_a3 = a;
        }
    }

    #[test]
    fn dlogz_is_minus_a3() {
        // central finite differences at 200 log-spaced points
        let n = 200;
        let (lo, hi) = (1e-2f64.ln(), 1e2f64.ln());
        for i in 0..n {
            let k = (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp();
            let h = 1e-5 * k.max(1.0);
            let fd = (log_norm_const(k + h).unwrap() - log_norm_const(k - h).unwrap()) / (2.0 * h);
            let expect = -a3(k).unwrap();
            assert!(
                rel(fd, expect) < 1e-6,
                "k={k}: fd={fd}, -a3={expect}, rel={}",
                rel(fd, expect)
            );
        }
    }

    #[test]
    fn a3_prime_matches_finite_differences() {
        for i in 0..100 {
            let k = 1e-3 * (10f64).powf(i as f64 * 7.0 / 99.0); // 1e-3 .. 1e4
            // h large enough that the ~1e-13 cancellation noise in direct a3
            // evaluations does not dominate the difference quotient
            let h = 1e-4 * k.max(1.0);
            let fd = (a3(k + h).unwrap() - a3(k - h).unwrap()) / (2.0 * h);
            let an = a3_prime(k).unwrap();
            assert!(
                (fd - an).abs() < 1e-7 * an.abs().max(1e-4),
                "k={k}: fd={fd} analytic={an}"
            );
        }
    }

    #[test]
    fn entropy_prime_series_consistent() {
        // both branches near the switch point
        let k = DERIV_SMALL;
        let k2 = k * k;
        let series = -k / 3.0 + k * k2 / 15.0 - 2.0 * k * k2 * k2 / 189.0;
        let s = k.sinh();
        let direct = -1.0 / k + k / (s * s);
        // the direct form subtracts operands of size 1/k; a few ulps of 100
        assert!((series - direct).abs() < 5e-13);
    }
}
