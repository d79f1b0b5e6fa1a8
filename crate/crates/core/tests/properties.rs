use proptest::prelude::*;

use quanto_collocation::collocation::{condition_coeffs, convolve, hermite_nodes, PolyCoeffs, MAX_ORDER, MIN_ORDER};
use quanto_collocation::market_surface::synthetic::{default_setup, flat_market, skewed_market, SkewScenario};
use quanto_collocation::normal;
use quanto_collocation::quanto_pricer::{build_context, calibrate_rho};

fn scenario() -> impl Strategy<Value = SkewScenario> {
    prop::sample::select(SkewScenario::ALL.to_vec())
}

fn poly(max_len: usize) -> impl Strategy<Value = PolyCoeffs> {
    prop::collection::vec(-2.0..2.0f64, 1..=max_len).prop_map(|c| PolyCoeffs::new(c).unwrap())
}

/// Probabilists' Hermite polynomial by the three-term recurrence.
fn hermite_he(n: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return p0;
    }
    for k in 1..n {
        let p2 = x * p1 - k as f64 * p0;
        p0 = p1;
        p1 = p2;
    }
    p1
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nodes_are_symmetric_sorted_roots(n in MIN_ORDER..=MAX_ORDER) {
        let basis = hermite_nodes(n).unwrap();
        let x = basis.nodes();
        prop_assert_eq!(x.len(), n);
        for i in 0..n {
            prop_assert_eq!(x[i], -x[n - 1 - i]);
            if i + 1 < n {
                prop_assert!(x[i] < x[i + 1]);
            }
            let newton_step = hermite_he(n, x[i]) / (n as f64 * hermite_he(n - 1, x[i]));
            prop_assert!(newton_step.abs() < 1e-13 * (1.0 + x[i].abs()), "He_{}({}) step {}", n, x[i], newton_step);
        }
    }

    #[test]
    fn interpolation_reproduces_polynomials(n in MIN_ORDER..=12usize, c in prop::collection::vec(-3.0..3.0f64, 12)) {
        let basis = hermite_nodes(n).unwrap();
        let p = PolyCoeffs::new(c[..n].to_vec()).unwrap();
        let values: Vec<f64> = basis.nodes().iter().map(|&x| p.eval(x)).collect();
        let fit = basis.solve(&values).unwrap();
        for (a, b) in fit.coeffs().iter().zip(p.coeffs()) {
            prop_assert!((a - b).abs() < 1e-8, "{} vs {}", a, b);
        }
    }

    #[test]
    fn convolution_is_commutative_and_associative(a in poly(6), b in poly(6), c in poly(6)) {
        let ab = convolve(&a, &b);
        let ba = convolve(&b, &a);
        for (x, y) in ab.coeffs().iter().zip(ba.coeffs()) {
            prop_assert!(close(*x, *y, 1e-15));
        }
        let left = convolve(&ab, &c);
        let right = convolve(&a, &convolve(&b, &c));
        for (x, y) in left.coeffs().iter().zip(right.coeffs()) {
            prop_assert!(close(*x, *y, 1e-12));
        }
        for z in [-1.5, 0.3, 2.0] {
            prop_assert!(close(ab.eval(z), a.eval(z) * b.eval(z), 1e-12));
        }
    }

    #[test]
    fn conditioning_preserves_the_mean(a in poly(10), rho in -1.0..=1.0f64) {
        let b = condition_coeffs(&a, rho).unwrap();
        prop_assert!(close(b.normal_mean(), a.normal_mean(), 1e-11));
    }

    #[test]
    fn conditioning_composes(a in poly(8), r1 in -1.0..=1.0f64, r2 in -1.0..=1.0f64) {
        let once = condition_coeffs(&a, r1 * r2).unwrap();
        let twice = condition_coeffs(&condition_coeffs(&a, r1).unwrap(), r2).unwrap();
        for z in [-2.0, -0.5, 0.0, 1.0, 2.5] {
            prop_assert!(close(once.eval(z), twice.eval(z), 1e-10));
        }
    }

    #[test]
    fn calls_are_decreasing_and_convex(sc in scenario(), t in 0.1..8.0f64) {
        let m = skewed_market(sc, 0.0).unwrap();
        let dist = m.equity.marginal(t).unwrap();
        let (lo, hi) = (dist.strike_lo().max(0.4 * dist.forward()), dist.strike_hi().min(1.6 * dist.forward()));
        let ks: Vec<f64> = (0..60).map(|i| lo + (hi - lo) * i as f64 / 59.0).collect();
        let c: Vec<f64> = ks.iter().map(|&k| m.equity.call_price(k, t).unwrap()).collect();
        for w in c.windows(3) {
            prop_assert!(w[1] <= w[0] + 1e-12);
            prop_assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-10);
        }
    }

    #[test]
    fn quantile_roundtrip(sc in scenario(), t in 0.1..8.0f64, z in -5.0..5.0f64) {
        let m = skewed_market(sc, 0.0).unwrap();
        let dist = m.fx.marginal(t).unwrap();
        let k = dist.quantile_at_score(z).unwrap();
        prop_assert!(k.saturated.is_none());
        prop_assert!((dist.normal_score(k.strike).unwrap() - z).abs() < 1e-9);
        let p = normal::cdf(z);
        let q = dist.quantile(p).unwrap();
        prop_assert!((dist.cdf(q.strike).unwrap() - p).abs() < 1e-12);
    }

    #[test]
    fn quanto_calls_are_decreasing_and_convex(sc in scenario(), rho in -0.95..0.95f64, t in 0.5..6.0f64) {
        let m = skewed_market(sc, rho).unwrap();
        let ctx = build_context(&m, t, 7, 7).unwrap();
        let ks: Vec<f64> = (0..50).map(|i| 60.0 + 2.0 * i as f64).collect();
        let p: Vec<f64> = ctx.price_strikes(&ks).into_iter().map(|r| r.unwrap().price).collect();
        for w in p.windows(3) {
            prop_assert!(w[1] < w[0]);
            prop_assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-9, "{:?}", w);
        }
    }

    #[test]
    fn spread_coefficients_are_affine_in_strike(sc in scenario(), rho in -0.95..0.95f64, k1 in 60.0..140.0f64, k2 in 60.0..140.0f64) {
        let m = skewed_market(sc, rho).unwrap();
        let ctx = build_context(&m, 1.0, 7, 6).unwrap();
        let (e1, e2, em) = (ctx.spread_coeffs(k1), ctx.spread_coeffs(k2), ctx.spread_coeffs(0.5 * (k1 + k2)));
        for i in 0..em.len() {
            prop_assert!(close(e1[i] + e2[i], 2.0 * em[i], 1e-12));
        }
    }

    #[test]
    fn flat_correlation_roundtrip(rho in -0.95..0.95f64, t in 0.25..5.0f64) {
        let m = flat_market(default_setup(rho), 0.2, 0.1).unwrap();
        let ctx = build_context(&m, t, 7, 7).unwrap();
        let target = ctx.quanto_forward();
        let fit = calibrate_rho(&ctx.with_rho(0.0).unwrap(), target).unwrap();
        prop_assert!((fit.rho - rho).abs() < 1e-6, "{} vs {}", fit.rho, rho);
    }
}
