use std::sync::Arc;

use super::{Slice, VolSurface};
use crate::error::{Error, Result};
use crate::normal;

const QUANTILE_MAX_ITER: usize = 100;
const SCORE_TOL: f64 = 1e-12;

/// Which edge of the strike domain a quantile request ran into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailSide {
    Lower,
    Upper,
}

/// Result of a quantile inversion. When the requested probability lies beyond the
/// mass captured by the strike bounds, `strike` is the domain edge and `saturated`
/// says which one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileValue {
    pub strike: f64,
    pub saturated: Option<TailSide>,
}

/// Foreign-measure law of an asset at one maturity, implied by its vol surface.
///
/// The CDF is `F(K) = 1 + ∂C/∂K` for undiscounted calls, evaluated analytically
/// through the smile: `F(K) = Φ(−d₂) + φ(d₂)·∂_y w / (2√w)`.
#[derive(Debug, Clone)]
pub struct MarginalDistribution {
    surface: Arc<VolSurface>,
    slice: Slice,
    score_lo: f64,
    score_hi: f64,
}

impl MarginalDistribution {
    pub fn new(surface: Arc<VolSurface>, expiry: f64) -> Result<Self> {
        let slice = surface.slice(expiry)?;
        let score_lo = surface.distribution_point(&slice, slice.strike_lo()).score;
        let score_hi = surface.distribution_point(&slice, slice.strike_hi()).score;
        Ok(Self {
            surface,
            slice,
            score_lo,
            score_hi,
        })
    }

    pub fn expiry(&self) -> f64 {
        self.slice.expiry
    }

    pub fn forward(&self) -> f64 {
        self.slice.forward
    }

    pub fn surface(&self) -> &Arc<VolSurface> {
        &self.surface
    }

    pub fn slice(&self) -> &Slice {
        &self.slice
    }

    pub fn strike_lo(&self) -> f64 {
        self.slice.strike_lo()
    }

    pub fn strike_hi(&self) -> f64 {
        self.slice.strike_hi()
    }

    /// Normal scores of the two domain edges.
    pub fn score_range(&self) -> (f64, f64) {
        (self.score_lo, self.score_hi)
    }

    fn check_strike(strike: f64) -> Result<()> {
        if strike.is_finite() && strike > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("strike must be positive, got {strike}")))
        }
    }

    /// `P(S_T ≤ K)`; strikes outside the bounds are clamped to the nearest edge.
    pub fn cdf(&self, strike: f64) -> Result<f64> {
        Self::check_strike(strike)?;
        Ok(self.surface.distribution_point(&self.slice, strike).cdf)
    }

    /// `P(S_T > K)`, accurate in the upper tail.
    pub fn survival(&self, strike: f64) -> Result<f64> {
        Self::check_strike(strike)?;
        Ok(self.surface.distribution_point(&self.slice, strike).survival)
    }

    /// `Φ⁻¹(F(K))`, computed from the smaller tail.
    pub fn normal_score(&self, strike: f64) -> Result<f64> {
        Self::check_strike(strike)?;
        Ok(self.surface.distribution_point(&self.slice, strike).score)
    }

    /// CDF, survival and score in one evaluation.
    pub fn tail_point(&self, strike: f64) -> Result<(f64, f64, f64)> {
        Self::check_strike(strike)?;
        let p = self.surface.distribution_point(&self.slice, strike);
        Ok((p.cdf, p.survival, p.score))
    }

    /// Density of `S_T` at `K` (zero outside the bounds).
    pub fn density(&self, strike: f64) -> Result<f64> {
        Self::check_strike(strike)?;
        let p = self.surface.distribution_point(&self.slice, strike);
        Ok(normal::pdf(p.score) * p.score_slope / strike)
    }

    /// Smallest strike with `F(K) ≥ q`.
    pub fn quantile(&self, q: f64) -> Result<QuantileValue> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidInput(format!(
                "probability must lie in (0, 1), got {q}"
            )));
        }
        self.quantile_at_score(normal::inv_cdf(q))
    }

    /// `F⁻¹(Φ(z))`: the strike whose normal score is `z`.
    pub fn quantile_at_score(&self, z: f64) -> Result<QuantileValue> {
        if !z.is_finite() {
            return Err(Error::InvalidInput(format!("normal score must be finite, got {z}")));
        }
        if z <= self.score_lo {
            return Ok(QuantileValue {
                strike: self.strike_lo(),
                saturated: Some(TailSide::Lower),
            });
        }
        if z >= self.score_hi {
            return Ok(QuantileValue {
                strike: self.strike_hi(),
                saturated: Some(TailSide::Upper),
            });
        }
        let fwd = self.slice.forward.ln();
        let (mut lo, mut hi) = (fwd + self.slice.y_lo, fwd + self.slice.y_hi);
        let atm_w = self.surface.variance(&self.slice, 0.0).w;
        let mut x = (fwd - 0.5 * atm_w + atm_w.sqrt() * z).clamp(lo, hi);
        for _ in 0..QUANTILE_MAX_ITER {
            let p = self.surface.distribution_point(&self.slice, x.exp());
            let resid = p.score - z;
            if resid.abs() <= SCORE_TOL {
                return Ok(QuantileValue {
                    strike: x.exp(),
                    saturated: None,
                });
            }
            if resid < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let newton = x - resid / p.score_slope;
            x = if p.score_slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
                return Ok(QuantileValue {
                    strike: x.exp(),
                    saturated: None,
                });
            }
        }
        Err(Error::NoConvergence(format!(
            "quantile at score {z}, T={}",
            self.slice.expiry
        )))
    }
}
