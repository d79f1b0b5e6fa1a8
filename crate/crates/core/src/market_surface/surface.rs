use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Asset, MarginalDistribution, MarketSetup};
use crate::black;
use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::normal;

/// Smallest time used when a quantity is requested at `t = 0`; the local-vol formula
/// has a finite limit there.
const MIN_TIME: f64 = 1e-8;

/// Minimum probability mass that the declared strike bounds of a pillar must capture.
const MIN_BOUNDED_MASS: f64 = 0.999;

const ARBITRAGE_GRID: usize = 201;

/// Smile parameters of one pillar: `σ(y) = atm_vol + skew·y + curvature·y²` in
/// log-moneyness `y = ln(K/F(T))`, held flat outside the pillar's strike bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmileParams {
    pub atm_vol: f64,
    pub skew: f64,
    pub curvature: f64,
}

impl SmileParams {
    pub fn flat(vol: f64) -> Self {
        Self {
            atm_vol: vol,
            skew: 0.0,
            curvature: 0.0,
        }
    }
}

/// One maturity of a surface as it appears in market data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pillar {
    #[serde(rename = "T")]
    pub expiry: f64,
    pub params: SmileParams,
    #[serde(rename = "K_lo")]
    pub strike_lo: f64,
    #[serde(rename = "K_hi")]
    pub strike_hi: f64,
}

#[derive(Debug, Clone, Copy)]
struct PillarSmile {
    expiry: f64,
    params: SmileParams,
    y_lo: f64,
    y_hi: f64,
}

impl PillarSmile {
    #[inline]
    fn vol(&self, y: f64) -> (f64, f64, f64) {
        let p = &self.params;
        let (u, inside) = if y < self.y_lo {
            (self.y_lo, false)
        } else if y > self.y_hi {
            (self.y_hi, false)
        } else {
            (y, true)
        };
        let vol = p.atm_vol + (p.skew + p.curvature * u) * u;
        if inside {
            (vol, p.skew + 2.0 * p.curvature * u, 2.0 * p.curvature)
        } else {
            (vol, 0.0, 0.0)
        }
    }

    /// Total variance `σ²T` and its first two derivatives in `y`.
    #[inline]
    fn total_variance(&self, y: f64) -> (f64, f64, f64) {
        let (v, dv, d2v) = self.vol(y);
        let t = self.expiry;
        (v * v * t, 2.0 * v * dv * t, 2.0 * (dv * dv + v * d2v) * t)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct SliceTerm {
    pillar: usize,
    /// weight of the pillar's total variance in `w(y, T)`
    level: f64,
    /// weight of the pillar's total variance in `∂w/∂T`
    slope: f64,
}

/// A maturity slice of a [`VolSurface`]: the forward, the evaluable log-moneyness
/// range and the pillar blend that produces total variance at that maturity.
#[derive(Debug, Clone, Copy)]
pub struct Slice {
    pub expiry: f64,
    pub forward: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    terms: [SliceTerm; 2],
}

impl Slice {
    pub fn strike_lo(&self) -> f64 {
        self.forward * self.y_lo.exp()
    }

    pub fn strike_hi(&self) -> f64 {
        self.forward * self.y_hi.exp()
    }

    pub fn contains(&self, strike: f64) -> bool {
        let y = (strike / self.forward).ln();
        y >= self.y_lo - 1e-12 && y <= self.y_hi + 1e-12
    }
}

/// Total variance and derivatives at one `(y, T)` point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceSample {
    pub w: f64,
    pub w_y: f64,
    pub w_yy: f64,
    pub w_t: f64,
}

impl VarianceSample {
    /// Durrleman's `g(y)`; the risk-neutral density is `φ(d₂)·g/(K√w)`, and `g` is the
    /// denominator of Dupire's formula in total-variance form.
    #[inline]
    pub fn durrleman(&self, y: f64) -> f64 {
        let a = 1.0 - y * self.w_y / (2.0 * self.w);
        a * a - 0.25 * self.w_y * self.w_y * (1.0 / self.w + 0.25) + 0.5 * self.w_yy
    }
}

/// Point evaluation of the marginal distribution implied by a slice.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DistributionPoint {
    pub cdf: f64,
    pub survival: f64,
    /// `Φ⁻¹(cdf)`, computed from whichever tail is smaller
    pub score: f64,
    /// `d score / d ln K`; zero outside the strike bounds
    pub score_slope: f64,
}

/// Implied volatility surface of one asset.
#[derive(Debug, Clone)]
pub struct VolSurface {
    asset: Asset,
    spot: f64,
    carry: f64,
    pillars: Vec<PillarSmile>,
    source: Vec<Pillar>,
}

impl VolSurface {
    /// Builds and validates a surface. Pillars must be sorted by maturity; each must
    /// straddle its forward, capture at least 99.9% of the probability mass within its
    /// strike bounds, and be free of butterfly and calendar arbitrage on a test grid.
    pub fn new(asset: Asset, spot: f64, carry: f64, pillars: &[Pillar]) -> Result<Self> {
        ensure_positive(spot, "spot")?;
        ensure_finite(carry, "carry")?;
        if pillars.is_empty() {
            return Err(Error::InvalidInput(format!(
                "{} surface has no pillars",
                asset.label()
            )));
        }
        let mut smiles = Vec::with_capacity(pillars.len());
        let mut prev_t = 0.0;
        for p in pillars {
            ensure_positive(p.expiry, "pillar T")?;
            if p.expiry <= prev_t {
                return Err(Error::InvalidInput(format!(
                    "{} pillars must have strictly increasing maturities (T={} after {prev_t})",
                    asset.label(),
                    p.expiry
                )));
            }
            prev_t = p.expiry;
            ensure_positive(p.params.atm_vol, "atm_vol")?;
            ensure_finite(p.params.skew, "skew")?;
            ensure_finite(p.params.curvature, "curvature")?;
            ensure_positive(p.strike_lo, "K_lo")?;
            ensure_positive(p.strike_hi, "K_hi")?;
            let fwd = spot * (carry * p.expiry).exp();
            if !(p.strike_lo < fwd && fwd < p.strike_hi) {
                return Err(Error::InvalidInput(format!(
                    "{} pillar T={}: bounds [{}, {}] must straddle the forward {fwd}",
                    asset.label(),
                    p.expiry,
                    p.strike_lo,
                    p.strike_hi
                )));
            }
            smiles.push(PillarSmile {
                expiry: p.expiry,
                params: p.params,
                y_lo: (p.strike_lo / fwd).ln(),
                y_hi: (p.strike_hi / fwd).ln(),
            });
        }
        let surface = Self {
            asset,
            spot,
            carry,
            pillars: smiles,
            source: pillars.to_vec(),
        };
        surface.check_arbitrage()?;
        Ok(surface)
    }

    pub fn from_setup(setup: &MarketSetup, asset: Asset, pillars: &[Pillar]) -> Result<Self> {
        Self::new(asset, setup.spot(asset), setup.carry(asset), pillars)
    }

    /// Flat-volatility surface with a single pillar whose bounds sit `bound_sd`
    /// standard deviations from the forward.
    pub fn flat(asset: Asset, spot: f64, carry: f64, vol: f64, expiry: f64, bound_sd: f64) -> Result<Self> {
        let fwd = spot * (carry * expiry).exp();
        let width = bound_sd * vol * expiry.sqrt();
        Self::new(
            asset,
            spot,
            carry,
            &[Pillar {
                expiry,
                params: SmileParams::flat(vol),
                strike_lo: fwd * (-width).exp(),
                strike_hi: fwd * width.exp(),
            }],
        )
    }

    pub fn asset(&self) -> Asset {
        self.asset
    }

    pub fn spot(&self) -> f64 {
        self.spot
    }

    pub fn carry(&self) -> f64 {
        self.carry
    }

    pub fn pillars(&self) -> &[Pillar] {
        &self.source
    }

    pub fn forward(&self, expiry: f64) -> f64 {
        self.spot * (self.carry * expiry).exp()
    }

    /// The maturity slice at `expiry > 0`.
    ///
    /// Total variance is linear in `T` at fixed log-moneyness between pillars, and scales
    /// linearly from zero (flat vol) before the first and after the last pillar. The
    /// evaluable range is the intersection of the bounds of the contributing pillars.
    pub fn slice(&self, expiry: f64) -> Result<Slice> {
        ensure_positive(expiry, "maturity")?;
        let forward = self.forward(expiry);
        let n = self.pillars.len();
        let first = &self.pillars[0];
        let last = &self.pillars[n - 1];
        let mut terms = [SliceTerm::default(); 2];
        let (y_lo, y_hi);
        if expiry <= first.expiry {
            terms[0] = SliceTerm {
                pillar: 0,
                level: expiry / first.expiry,
                slope: 1.0 / first.expiry,
            };
            y_lo = first.y_lo;
            y_hi = first.y_hi;
        } else if expiry >= last.expiry {
            terms[0] = SliceTerm {
                pillar: n - 1,
                level: expiry / last.expiry,
                slope: 1.0 / last.expiry,
            };
            y_lo = last.y_lo;
            y_hi = last.y_hi;
        } else {
            // first pillar strictly after `expiry`
            let j = self.pillars.partition_point(|p| p.expiry <= expiry);
            let (a, b) = (&self.pillars[j - 1], &self.pillars[j]);
            let span = b.expiry - a.expiry;
            let alpha = (expiry - a.expiry) / span;
            terms[0] = SliceTerm {
                pillar: j - 1,
                level: 1.0 - alpha,
                slope: -1.0 / span,
            };
            terms[1] = SliceTerm {
                pillar: j,
                level: alpha,
                slope: 1.0 / span,
            };
            y_lo = a.y_lo.max(b.y_lo);
            y_hi = a.y_hi.min(b.y_hi);
        }
        Ok(Slice {
            expiry,
            forward,
            y_lo,
            y_hi,
            terms,
        })
    }

    /// Total variance and its derivatives at log-moneyness `y` on a slice.
    #[inline]
    pub fn variance(&self, slice: &Slice, y: f64) -> VarianceSample {
        let mut out = VarianceSample {
            w: 0.0,
            w_y: 0.0,
            w_yy: 0.0,
            w_t: 0.0,
        };
        for term in &slice.terms {
            if term.level == 0.0 && term.slope == 0.0 {
                continue;
            }
            let (w, w_y, w_yy) = self.pillars[term.pillar].total_variance(y);
            out.w += term.level * w;
            out.w_y += term.level * w_y;
            out.w_yy += term.level * w_yy;
            out.w_t += term.slope * w;
        }
        out
    }

    /// Implied volatility at any positive strike (flat beyond the pillar bounds).
    pub fn implied_vol(&self, strike: f64, expiry: f64) -> Result<f64> {
        ensure_positive(strike, "strike")?;
        let slice = self.slice(expiry)?;
        Ok(self.implied_vol_on(&slice, strike))
    }

    pub fn implied_vol_on(&self, slice: &Slice, strike: f64) -> f64 {
        let y = (strike / slice.forward).ln();
        (self.variance(slice, y).w / slice.expiry).sqrt()
    }

    /// Implied volatility at the forward.
    pub fn atm_vol(&self, expiry: f64) -> Result<f64> {
        let slice = self.slice(expiry)?;
        Ok((self.variance(&slice, 0.0).w / expiry).sqrt())
    }

    /// Undiscounted foreign-measure call value `E_F[(S_T − K)_+]` from the Black formula
    /// at the smile volatility.
    pub fn call_price(&self, strike: f64, expiry: f64) -> Result<f64> {
        let slice = self.slice(expiry)?;
        self.call_price_on(&slice, strike)
    }

    pub fn call_price_on(&self, slice: &Slice, strike: f64) -> Result<f64> {
        self.check_domain(slice, strike)?;
        let vol = self.implied_vol_on(slice, strike);
        Ok(black::call(slice.forward, strike, vol, slice.expiry))
    }

    pub(crate) fn check_domain(&self, slice: &Slice, strike: f64) -> Result<()> {
        if strike.is_finite() && strike > 0.0 && slice.contains(strike) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                strike,
                lo: slice.strike_lo(),
                hi: slice.strike_hi(),
                expiry: slice.expiry,
            })
        }
    }

    /// Dupire local volatility at `(K, t)`, from total variance:
    /// `σ²_loc = ∂_T w / g(y)` with `g` the Durrleman function.
    pub fn local_vol(&self, strike: f64, time: f64) -> Result<f64> {
        if !(time >= 0.0) {
            return Err(Error::InvalidInput(format!("time must be >= 0, got {time}")));
        }
        ensure_positive(strike, "strike")?;
        let slice = self.slice(time.max(MIN_TIME))?;
        self.local_vol_on(&slice, strike)
    }

    pub fn local_vol_on(&self, slice: &Slice, strike: f64) -> Result<f64> {
        self.local_vol_at(slice, (strike / slice.forward).ln())
    }

    /// Local vol at log-moneyness `y = ln(K/F)` on a slice.
    pub fn local_vol_at(&self, slice: &Slice, y: f64) -> Result<f64> {
        let v = self.variance(slice, y);
        let g = v.durrleman(y);
        if g > 0.0 && v.w_t > 0.0 {
            return Ok((v.w_t / g).sqrt());
        }
        let strike = slice.forward * y.exp();
        if !(g > 0.0) {
            return Err(Error::Arbitrage {
                strike,
                time: slice.expiry,
                reason: format!("non-positive Dupire denominator {g} (butterfly)"),
            });
        }
        Err(Error::Arbitrage {
            strike,
            time: slice.expiry,
            reason: format!("non-positive total-variance slope {} (calendar)", v.w_t),
        })
    }

    /// Marginal distribution of the asset at `expiry` under the foreign measure.
    pub fn marginal(self: &Arc<Self>, expiry: f64) -> Result<MarginalDistribution> {
        MarginalDistribution::new(Arc::clone(self), expiry)
    }

    /// CDF, survival and normal score at a strike, with the strike clamped into the
    /// slice bounds.
    #[inline]
    pub(crate) fn distribution_point(&self, slice: &Slice, strike: f64) -> DistributionPoint {
        let y_raw = (strike / slice.forward).ln();
        let inside = y_raw >= slice.y_lo && y_raw <= slice.y_hi;
        let y = y_raw.clamp(slice.y_lo, slice.y_hi);
        let v = self.variance(slice, y);
        let sw = v.w.sqrt();
        let d2 = -y / sw - 0.5 * sw;
        let pdf_d2 = normal::pdf(d2);
        let adj = pdf_d2 * v.w_y / (2.0 * sw);
        let (cdf, survival) = if d2 >= 0.0 {
            let c = (normal::cdf(-d2) + adj).clamp(0.0, 1.0);
            (c, 1.0 - c)
        } else {
            let s = (normal::cdf(d2) - adj).clamp(0.0, 1.0);
            (1.0 - s, s)
        };
        let score = if cdf <= 0.5 {
            normal::inv_cdf(cdf)
        } else {
            -normal::inv_cdf(survival)
        };
        let score_slope = if inside && score.is_finite() {
            let g = v.durrleman(y);
            (0.5 * (score * score - d2 * d2)).exp() * g / sw
        } else {
            0.0
        };
        DistributionPoint {
            cdf,
            survival,
            score,
            score_slope,
        }
    }

    fn check_arbitrage(&self) -> Result<()> {
        for p in &self.pillars {
            let fwd = self.forward(p.expiry);
            let mut prev_cdf = 0.0;
            for i in 0..ARBITRAGE_GRID {
                let y = p.y_lo + (p.y_hi - p.y_lo) * i as f64 / (ARBITRAGE_GRID - 1) as f64;
                let strike = fwd * y.exp();
                let (vol, _, _) = p.vol(y);
                if !(vol > 0.0) {
                    return Err(Error::Arbitrage {
                        strike,
                        time: p.expiry,
                        reason: format!("non-positive implied vol {vol}"),
                    });
                }
                let (w, w_y, w_yy) = p.total_variance(y);
                let sample = VarianceSample { w, w_y, w_yy, w_t: 0.0 };
                let g = sample.durrleman(y);
                if !(g > 0.0) {
                    return Err(Error::Arbitrage {
                        strike,
                        time: p.expiry,
                        reason: format!("negative density, Durrleman g = {g} (butterfly)"),
                    });
                }
                let sw = w.sqrt();
                let d2 = -y / sw - 0.5 * sw;
                let adj = normal::pdf(d2) * w_y / (2.0 * sw);
                let cdf = if d2 >= 0.0 {
                    normal::cdf(-d2) + adj
                } else {
                    1.0 - (normal::cdf(d2) - adj)
                };
                if cdf < prev_cdf - 1e-13 {
                    return Err(Error::Arbitrage {
                        strike,
                        time: p.expiry,
                        reason: "decreasing CDF (butterfly)".into(),
                    });
                }
                prev_cdf = cdf;
            }
            let lo = self.pillar_tail(p, p.y_lo);
            let hi = self.pillar_tail(p, p.y_hi);
            if 1.0 - lo.0 - hi.1 < MIN_BOUNDED_MASS {
                return Err(Error::InvalidInput(format!(
                    "{} pillar T={}: bounds capture only {:.6} of the probability mass (< {MIN_BOUNDED_MASS})",
                    self.asset.label(),
                    p.expiry,
                    1.0 - lo.0 - hi.1
                )));
            }
        }
        for pair in self.pillars.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let lo = a.y_lo.min(b.y_lo);
            let hi = a.y_hi.max(b.y_hi);
            for i in 0..2 * ARBITRAGE_GRID {
                let y = lo + (hi - lo) * i as f64 / (2 * ARBITRAGE_GRID - 1) as f64;
                let (wa, _, _) = a.total_variance(y);
                let (wb, _, _) = b.total_variance(y);
                if !(wb > wa) {
                    return Err(Error::Arbitrage {
                        strike: self.forward(b.expiry) * y.exp(),
                        time: b.expiry,
                        reason: format!(
                            "total variance decreases between T={} and T={} (calendar)",
                            a.expiry, b.expiry
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    /// `(cdf, survival)` of a single pillar at log-moneyness `y`.
    fn pillar_tail(&self, p: &PillarSmile, y: f64) -> (f64, f64) {
        let (w, w_y, _) = p.total_variance(y);
        let sw = w.sqrt();
        let d2 = -y / sw - 0.5 * sw;
        let adj = normal::pdf(d2) * w_y / (2.0 * sw);
        (normal::cdf(-d2) + adj, normal::cdf(d2) - adj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn skewed() -> VolSurface {
        super::super::synthetic::skewed_surface(
            Asset::Equity,
            100.0,
            0.01,
            &super::super::synthetic::SmileShape {
                atm_vol: 0.2,
                term_slope: 0.03,
                skew: -0.12,
                curvature: 0.01,
            },
        )
        .unwrap()
    }

    #[test]
    fn flat_surface_local_vol_is_flat() {
        let s = VolSurface::flat(Asset::Fx, 1.0, 0.0, 0.1, 1.0, 10.0).unwrap();
        for &t in &[0.0, 0.1, 0.5, 1.0, 3.0] {
            for &k in &[0.5, 0.9, 1.0, 1.3, 4.0] {
                assert_abs_diff_eq!(s.local_vol(k, t).unwrap(), 0.1, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn time_dependent_flat_local_vol() {
        // σ̂(1)=0.2, σ̂(2)=0.25 → forward variance (0.25²·2 − 0.2²)/1
        let pillars: Vec<Pillar> = [(1.0, 0.2), (2.0, 0.25)]
            .iter()
            .map(|&(t, v)| Pillar {
                expiry: t,
                params: SmileParams::flat(v),
                strike_lo: 100.0 * (-12.0 * v * f64::sqrt(t)).exp(),
                strike_hi: 100.0 * (12.0 * v * f64::sqrt(t)).exp(),
            })
            .collect();
        let s = VolSurface::new(Asset::Equity, 100.0, 0.0, &pillars).unwrap();
        let fwd_var = 0.25f64.powi(2) * 2.0 - 0.04;
        assert_abs_diff_eq!(s.local_vol(100.0, 1.5).unwrap(), fwd_var.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(s.local_vol(70.0, 0.5).unwrap(), 0.2, epsilon = 1e-14);
        assert_abs_diff_eq!(s.local_vol(130.0, 3.0).unwrap(), 0.25, epsilon = 1e-14);
        // implied vol at 1.5y interpolates total variance
        let w = 0.5 * 0.04 + 0.5 * 0.125;
        assert_abs_diff_eq!(s.atm_vol(1.5).unwrap(), (w / 1.5f64).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn call_price_domain_and_bounds() {
        let s = skewed();
        let slice = s.slice(2.0).unwrap();
        let fwd = slice.forward;
        for i in 0..50 {
            let k = slice.strike_lo() * (slice.strike_hi() / slice.strike_lo()).powf(i as f64 / 49.0);
            let c = s.call_price(k, 2.0).unwrap();
            assert!(c >= (fwd - k).max(0.0) - 1e-10 && c <= fwd + 1e-12);
        }
        assert!(matches!(
            s.call_price(slice.strike_hi() * 1.5, 2.0),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(s.call_price(-1.0, 2.0).is_err());
    }

    #[test]
    fn call_prices_convex_and_decreasing_on_log_grid() {
        let s = skewed();
        for &t in &[0.25, 0.5, 0.8, 2.0, 5.0, 9.0] {
            let slice = s.slice(t).unwrap();
            let (lo, hi) = (slice.strike_lo().ln(), slice.strike_hi().ln());
            let ks: Vec<f64> = (0..200).map(|i| (lo + (hi - lo) * i as f64 / 199.0).exp()).collect();
            let cs: Vec<f64> = ks.iter().map(|&k| s.call_price_on(&slice, k).unwrap()).collect();
            for i in 1..200 {
                assert!(cs[i] <= cs[i - 1] * (1.0 + 1e-10) + 1e-12, "T={t} i={i}");
            }
            // midpoint convexity in strike on the non-uniform grid
            for i in 1..199 {
                let lam = (ks[i + 1] - ks[i]) / (ks[i + 1] - ks[i - 1]);
                let chord = lam * cs[i - 1] + (1.0 - lam) * cs[i + 1];
                assert!(cs[i] <= chord + 1e-10 * chord.abs().max(1e-6), "T={t} i={i}");
            }
        }
    }

    #[test]
    fn local_vol_matches_finite_difference_dupire() {
        // Oracle: Dupire on call prices by finite differences in K and T,
        // σ² = (∂C/∂T − μ C + μ K ∂C/∂K) / (½ K² ∂²C/∂K²) for undiscounted calls with drift μ.
        // T = 0.5 is a pillar, where the local vol is the right derivative in T.
        let s = skewed();
        let mu = s.carry();
        let c = |k: f64, t: f64| s.call_price(k, t).unwrap();
        let (hk, ht) = (0.05, 1e-4);
        for &(k, t, one_sided) in &[(100.0, 0.5, true), (100.0, 0.7, false), (85.0, 1.5, false)] {
            let c_t = if one_sided {
                (-3.0 * c(k, t) + 4.0 * c(k, t + ht) - c(k, t + 2.0 * ht)) / (2.0 * ht)
            } else {
                (c(k, t + ht) - c(k, t - ht)) / (2.0 * ht)
            };
            let c_k = (c(k + hk, t) - c(k - hk, t)) / (2.0 * hk);
            let c_kk = (c(k + hk, t) - 2.0 * c(k, t) + c(k - hk, t)) / (hk * hk);
            let fd = ((c_t - mu * c(k, t) + mu * k * c_k) / (0.5 * k * k * c_kk)).sqrt();
            let lv = s.local_vol(k, t).unwrap();
            assert!((lv - fd).abs() < 1e-4, "K={k} t={t}: analytic {lv} vs finite-difference {fd}");
        }
    }

    #[test]
    fn rejects_arbitrage() {
        let bad = Pillar {
            expiry: 1.0,
            params: SmileParams {
                atm_vol: 0.2,
                skew: -2.0,
                curvature: 0.0,
            },
            strike_lo: 10.0,
            strike_hi: 1000.0,
        };
        assert!(matches!(
            VolSurface::new(Asset::Equity, 100.0, 0.0, &[bad]),
            Err(Error::Arbitrage { .. })
        ));
        let cal = [(1.0, 0.3), (2.0, 0.2)].map(|(t, v)| Pillar {
            expiry: t,
            params: SmileParams::flat(v),
            strike_lo: 5.0,
            strike_hi: 2000.0,
        });
        assert!(matches!(
            VolSurface::new(Asset::Equity, 100.0, 0.0, &cal),
            Err(Error::Arbitrage { .. })
        ));
        let narrow = Pillar {
            expiry: 1.0,
            params: SmileParams::flat(0.2),
            strike_lo: 90.0,
            strike_hi: 110.0,
        };
        assert!(VolSurface::new(Asset::Equity, 100.0, 0.0, &[narrow]).is_err());
    }
}
