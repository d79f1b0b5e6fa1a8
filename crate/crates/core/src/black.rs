//! Undiscounted Black formula and its inversion.

use crate::error::{Error, Result};
use crate::normal;

/// Undiscounted Black call `E[(S_T - K)_+]` for a lognormal `S_T` with mean `forward`.
pub fn call(forward: f64, strike: f64, vol: f64, expiry: f64) -> f64 {
    if strike >= forward {
        otm_price(forward, strike, vol * expiry.max(0.0).sqrt())
    } else {
        otm_price(forward, strike, vol * expiry.max(0.0).sqrt()) + (forward - strike)
    }
}

/// Undiscounted Black put.
pub fn put(forward: f64, strike: f64, vol: f64, expiry: f64) -> f64 {
    if strike <= forward {
        otm_price(forward, strike, vol * expiry.max(0.0).sqrt())
    } else {
        otm_price(forward, strike, vol * expiry.max(0.0).sqrt()) + (strike - forward)
    }
}

/// Price of the out-of-the-money option (call for `K >= F`, put otherwise) given total
/// standard deviation `stdev = σ√T`. Computed without the intrinsic cancellation.
pub(crate) fn otm_price(forward: f64, strike: f64, stdev: f64) -> f64 {
    if strike <= 0.0 {
        return 0.0;
    }
    if stdev <= 0.0 {
        return 0.0;
    }
    let (d1, d2) = d1_d2(forward, strike, stdev);
    if strike >= forward {
        (forward * normal::cdf(d1) - strike * normal::cdf(d2)).max(0.0)
    } else {
        (strike * normal::cdf(-d2) - forward * normal::cdf(-d1)).max(0.0)
    }
}

#[inline]
pub(crate) fn d1_d2(forward: f64, strike: f64, stdev: f64) -> (f64, f64) {
    let d1 = ((forward / strike).ln() + 0.5 * stdev * stdev) / stdev;
    (d1, d1 - stdev)
}

/// Undiscounted vega `∂C/∂σ`.
pub fn vega(forward: f64, strike: f64, vol: f64, expiry: f64) -> f64 {
    let stdev = vol * expiry.sqrt();
    if stdev <= 0.0 || strike <= 0.0 {
        return 0.0;
    }
    let (d1, _) = d1_d2(forward, strike, stdev);
    forward * normal::pdf(d1) * expiry.sqrt()
}

/// Black implied volatility of an undiscounted call price.
///
/// The solve runs on the out-of-the-money side (put via parity for `K < F`), so deep
/// in-the-money inputs do not lose their time value to cancellation.
pub fn implied_vol(price: f64, forward: f64, strike: f64, expiry: f64) -> Result<f64> {
    if !(forward > 0.0 && strike > 0.0 && expiry > 0.0) || !price.is_finite() {
        return Err(Error::InvalidInput(format!(
            "implied vol needs positive forward/strike/expiry and finite price \
             (F={forward}, K={strike}, T={expiry}, price={price})"
        )));
    }
    let intrinsic = (forward - strike).max(0.0);
    let slack = 1e-13 * forward;
    if price < intrinsic - slack || price > forward + slack {
        return Err(Error::PriceBounds {
            price,
            lower: intrinsic,
            upper: forward,
        });
    }
    let target = if strike < forward {
        price - (forward - strike)
    } else {
        price
    };
    if target <= 0.0 {
        return Ok(0.0);
    }
    let sqrt_t = expiry.sqrt();
    let f = |stdev: f64| otm_price(forward, strike, stdev) - target;

    let mut lo = 0.0;
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::PriceBounds {
                price,
                lower: intrinsic,
                upper: forward,
            });
        }
    }
    // Newton on total stdev, safeguarded by the bracket.
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx.abs() <= 1e-14 * forward.max(1.0) {
            return Ok(x / sqrt_t);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let (d1, _) = d1_d2(forward, strike, x);
        let slope = forward * normal::pdf(d1);
        let newton = x - fx / slope;
        x = if slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 1e-16 * hi {
            return Ok(x / sqrt_t);
        }
    }
    Ok(x / sqrt_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn atm_price_matches_closed_form() {
        // F (2Φ(σ√T/2) - 1)
        let expected = 100.0 * (2.0 * normal::cdf(0.2 * 2f64.sqrt() / 2.0) - 1.0);
        assert_abs_diff_eq!(call(100.0, 100.0, 0.2, 2.0), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 11.246, epsilon = 1e-3);
    }

    #[test]
    fn limits() {
        assert_abs_diff_eq!(call(100.0, 1e-9, 0.2, 2.0), 100.0, epsilon = 1e-8);
        assert_eq!(call(100.0, 120.0, 1e-12, 2.0), 0.0);
        assert_abs_diff_eq!(call(100.0, 80.0, 0.0, 1.0), 20.0, epsilon = 1e-14);
    }

    #[test]
    fn parity() {
        for &k in &[60.0, 95.0, 100.0, 140.0] {
            let c = call(100.0, k, 0.25, 1.5);
            let p = put(100.0, k, 0.25, 1.5);
            assert_abs_diff_eq!(c - p, 100.0 - k, epsilon = 1e-12);
        }
    }

    #[test]
    fn implied_vol_roundtrip() {
        let p = call(100.0, 100.0, 0.2, 2.0);
        assert_abs_diff_eq!(implied_vol(p, 100.0, 100.0, 2.0).unwrap(), 0.2, epsilon = 1e-10);
        assert_abs_diff_eq!(implied_vol(11.246, 100.0, 100.0, 2.0).unwrap(), 0.2, epsilon = 1e-4);
        for &(k, v, t) in &[(50.0, 0.3, 0.5), (160.0, 0.15, 5.0), (99.0, 0.05, 0.1)] {
            let p = call(100.0, k, v, t);
            let iv = implied_vol(p, 100.0, k, t).unwrap();
            assert_abs_diff_eq!(call(100.0, k, iv, t), p, epsilon = 1e-12);
        }
    }

    #[test]
    fn implied_vol_intrinsic_limit_and_bounds() {
        assert_eq!(implied_vol(20.0, 100.0, 80.0, 1.0).unwrap(), 0.0);
        assert!(matches!(
            implied_vol(19.0, 100.0, 80.0, 1.0),
            Err(Error::PriceBounds { .. })
        ));
        assert!(matches!(
            implied_vol(101.0, 100.0, 80.0, 1.0),
            Err(Error::PriceBounds { .. })
        ));
    }
}
