//! Standard normal density, distribution and quantile.
//!
//! Upper tails go through `erfc` directly so that survival probabilities keep
//! full relative precision far into the tail.

use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[inline]
pub fn pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

#[inline]
pub fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// `1 - cdf(x)` without cancellation.
#[inline]
pub fn survival(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Quantile of the standard normal; `p` in (0, 1).
///
/// The lower half is solved directly and the upper half by reflection, so tail
/// quantiles inherit the relative precision of `p` or `1 - p`.
#[inline]
pub fn inv_cdf(p: f64) -> f64 {
    if p > 0.5 {
        -lower_quantile(1.0 - p)
    } else {
        lower_quantile(p)
    }
}

/// Quantile for `p <= 0.5`: the `erfc_inv` estimate polished by two Halley steps.
fn lower_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let mut x = -SQRT_2 * erfc_inv(2.0 * p);
    for _ in 0..2 {
        let density = pdf(x);
        if density == 0.0 {
            break;
        }
        let r = (cdf(x) - p) / density;
        x -= r / (1.0 + 0.5 * x * r);
    }
    x
}

/// Raw moment `E[Z^n]` of a standard normal: `(n-1)!!` for even `n`, zero otherwise.
pub fn raw_moment(n: usize) -> f64 {
    if n % 2 == 1 {
        0.0
    } else {
        double_factorial(n as i64 - 1)
    }
}

/// `n!!` with the convention `(-1)!! = 0!! = 1`.
pub fn double_factorial(n: i64) -> f64 {
    let mut acc = 1.0;
    let mut k = n;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reference_values() {
        assert_abs_diff_eq!(cdf(0.0), 0.5, epsilon = 1e-16);
        assert_abs_diff_eq!(cdf(1.0), 0.841_344_746_068_542_9, epsilon = 1e-15);
        assert_abs_diff_eq!(cdf(-1.959_963_984_540_054), 0.025, epsilon = 1e-15);
        assert_abs_diff_eq!(pdf(0.0), 0.398_942_280_401_432_7, epsilon = 1e-16);
        // Upper tail keeps relative precision.
        let s = survival(8.0);
        assert!((s / 6.220_960_574_271_784e-16 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_roundtrip() {
        for &x in &[-37.0, -8.0, -3.3, -1.0, 0.0, 0.25, 2.0] {
            assert_abs_diff_eq!(inv_cdf(cdf(x)), x, epsilon = 1e-13 * (1.0 + x.abs()));
        }
        for &x in &[0.5, 3.0, 8.0, 20.0] {
            assert_abs_diff_eq!(-inv_cdf(survival(x)), x, epsilon = 1e-13 * x);
        }
        assert_abs_diff_eq!(inv_cdf(0.5), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn moments() {
        assert_eq!(raw_moment(0), 1.0);
        assert_eq!(raw_moment(1), 0.0);
        assert_eq!(raw_moment(2), 1.0);
        assert_eq!(raw_moment(4), 3.0);
        assert_eq!(raw_moment(6), 15.0);
        assert_eq!(raw_moment(7), 0.0);
        assert_eq!(double_factorial(-1), 1.0);
        assert_eq!(double_factorial(7), 105.0);
    }
}
