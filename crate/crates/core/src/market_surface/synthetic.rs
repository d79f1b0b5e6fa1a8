//! Synthetic arbitrage-free markets used by tests, examples and the CLI fixtures.
//!
//! Smiles are built from a [`SmileShape`]: at pillar `T` the vol is
//! `a(T)·(1 + skew·x + curvature·x²)` in standardized moneyness `x = y/√T`, with
//! `a(T) = atm_vol·(1 + term_slope·ln T)`. Total variance then increases in `T` at
//! fixed log-moneyness as long as `|x| < 1/√curvature`, so curvature is kept small.
//! Strike bounds are placed where the pillar's normal score reaches ±[`BOUND_SCORE`].

use super::{Asset, MarketData, MarketSetup, Pillar, SmileParams, VarianceSample, VolSurface};
use crate::error::{Error, Result};
use crate::normal;

/// Normal score at which synthetic pillars place their strike bounds.
pub const BOUND_SCORE: f64 = 7.5;

/// Pillar maturities of the synthetic surfaces.
pub const PILLAR_EXPIRIES: [f64; 8] = [0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0];

/// Dimensionless smile shape; see the module docs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmileShape {
    pub atm_vol: f64,
    /// Must be non-negative to rule out calendar arbitrage in the wings.
    pub term_slope: f64,
    pub skew: f64,
    pub curvature: f64,
}

impl SmileShape {
    pub fn flat(vol: f64) -> Self {
        Self {
            atm_vol: vol,
            term_slope: 0.0,
            skew: 0.0,
            curvature: 0.0,
        }
    }

    fn params(&self, expiry: f64) -> SmileParams {
        let a = self.atm_vol * (1.0 + self.term_slope * expiry.ln());
        SmileParams {
            atm_vol: a,
            skew: a * self.skew / expiry.sqrt(),
            curvature: a * self.curvature / expiry,
        }
    }
}

/// The three skewed test markets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkewScenario {
    /// Upward-sloping smiles on both assets.
    PositiveBoth,
    /// Equity put skew with a symmetric FX smile.
    NegativeEquity,
    /// Equity call skew with an FX put skew.
    Mixed,
}

impl SkewScenario {
    pub const ALL: [SkewScenario; 3] = [
        SkewScenario::PositiveBoth,
        SkewScenario::NegativeEquity,
        SkewScenario::Mixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SkewScenario::PositiveBoth => "positive-both",
            SkewScenario::NegativeEquity => "negative-equity",
            SkewScenario::Mixed => "mixed",
        }
    }

    pub fn shapes(self) -> (SmileShape, SmileShape) {
        let eq = |skew, curvature| SmileShape {
            atm_vol: 0.2,
            term_slope: 0.03,
            skew,
            curvature,
        };
        let fx = |skew, curvature| SmileShape {
            atm_vol: 0.1,
            term_slope: 0.02,
            skew,
            curvature,
        };
        match self {
            SkewScenario::PositiveBoth => (eq(0.12, 0.01), fx(0.15, 0.015)),
            SkewScenario::NegativeEquity => (eq(-0.25, 0.015), fx(0.0, 0.02)),
            SkewScenario::Mixed => (eq(0.12, 0.01), fx(-0.15, 0.015)),
        }
    }
}

/// Default rates and spots of the synthetic markets (non-zero carry on both assets and
/// a non-unit FX spot, so scaling conventions are exercised).
pub fn default_setup(rho: f64) -> MarketSetup {
    MarketSetup {
        spot_equity: 100.0,
        spot_fx: 1.25,
        rate_foreign: 0.01,
        rate_domestic: 0.03,
        div_yield: 0.015,
        rho,
    }
}

fn shape_vol(p: &SmileParams, y: f64) -> (f64, f64, f64) {
    let v = p.atm_vol + (p.skew + p.curvature * y) * y;
    (v, p.skew + 2.0 * p.curvature * y, 2.0 * p.curvature)
}

/// Searches outward from the forward for the log-moneyness where the pillar's score
/// reaches `target` (negative: left wing), checking positivity of vol and density.
fn find_bound(p: &SmileParams, expiry: f64, target: f64) -> Result<f64> {
    let dir = target.signum();
    let step = 0.01 * p.atm_vol * expiry.sqrt();
    let mut y = 0.0;
    for _ in 0..200_000 {
        y += dir * step;
        let (v, dv, d2v) = shape_vol(p, y);
        let sample = VarianceSample {
            w: v * v * expiry,
            w_y: 2.0 * v * dv * expiry,
            w_yy: 2.0 * (dv * dv + v * d2v) * expiry,
            w_t: 0.0,
        };
        if !(v > 0.0) || !(sample.durrleman(y) > 0.0) {
            break;
        }
        let sw = sample.w.sqrt();
        let d2 = -y / sw - 0.5 * sw;
        let adj = normal::pdf(d2) * sample.w_y / (2.0 * sw);
        let score = if dir < 0.0 {
            normal::inv_cdf(normal::cdf(-d2) + adj)
        } else {
            -normal::inv_cdf(normal::cdf(d2) - adj)
        };
        if score * dir >= target * dir {
            return Ok(y);
        }
    }
    Err(Error::InvalidInput(format!(
        "smile {p:?} at T={expiry} is not arbitrage-free out to score {target}"
    )))
}

/// Surface with one pillar per entry of [`PILLAR_EXPIRIES`].
pub fn skewed_surface(asset: Asset, spot: f64, carry: f64, shape: &SmileShape) -> Result<VolSurface> {
    let mut pillars = Vec::with_capacity(PILLAR_EXPIRIES.len());
    for &t in &PILLAR_EXPIRIES {
        let params = shape.params(t);
        let fwd = spot * (carry * t).exp();
        let y_lo = find_bound(&params, t, -BOUND_SCORE)?;
        let y_hi = find_bound(&params, t, BOUND_SCORE)?;
        pillars.push(Pillar {
            expiry: t,
            params,
            strike_lo: fwd * y_lo.exp(),
            strike_hi: fwd * y_hi.exp(),
        });
    }
    VolSurface::new(asset, spot, carry, &pillars)
}

/// Market with flat implied vols on both assets.
pub fn flat_market(setup: MarketSetup, vol_equity: f64, vol_fx: f64) -> Result<MarketData> {
    market_from_shapes(setup, &SmileShape::flat(vol_equity), &SmileShape::flat(vol_fx))
}

/// Market with arbitrary smile shapes on both assets.
pub fn market_from_shapes(setup: MarketSetup, equity: &SmileShape, fx: &SmileShape) -> Result<MarketData> {
    setup.validate()?;
    MarketData::new(
        setup,
        skewed_surface(Asset::Equity, setup.spot_equity, setup.carry(Asset::Equity), equity)?,
        skewed_surface(Asset::Fx, setup.spot_fx, setup.carry(Asset::Fx), fx)?,
    )
}

/// One of the three skewed test markets on [`default_setup`].
pub fn skewed_market(scenario: SkewScenario, rho: f64) -> Result<MarketData> {
    let (eq, fx) = scenario.shapes();
    market_from_shapes(default_setup(rho), &eq, &fx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenarios_build_and_capture_mass() {
        for sc in SkewScenario::ALL {
            let m = skewed_market(sc, 0.5).unwrap();
            for surf in [&m.equity, &m.fx] {
                for &t in &[0.25, 0.5, 1.5, 2.0, 5.0, 8.0] {
                    let d = surf.marginal(t).unwrap();
                    let (lo, hi) = d.score_range();
                    assert!(lo < -5.0 && hi > 5.0, "{} {t}: {lo} {hi}", sc.name());
                    let mass = d.cdf(d.strike_hi()).unwrap() - d.cdf(d.strike_lo()).unwrap();
                    assert!(mass >= 0.999);
                }
            }
        }
    }

    #[test]
    fn flat_market_builds() {
        let m = flat_market(default_setup(0.7), 0.2, 0.1).unwrap();
        assert!((m.equity.implied_vol(150.0, 3.0).unwrap() - 0.2).abs() < 1e-15);
    }
}
