use crate::error::{Error, Result};
use crate::market_surface::{MarginalDistribution, MarketData};
use crate::normal;

use super::quadrature::{composite_legendre, gauss_legendre};

const PANEL_POINTS: usize = 20;

/// Resolution of the copula integrator. The FX dimension is a trapezoid rule with
/// `points` nodes on `[−z_max, z_max]`; the equity dimension a composite
/// Gauss-Legendre rule with about `points` nodes. The correlation is the market's.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub points: usize,
    pub z_max: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            points: 400,
            z_max: 8.0,
        }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<()> {
        if self.points < 2 * PANEL_POINTS || !(self.z_max > 0.0 && self.z_max.is_finite()) {
            return Err(Error::InvalidInput(format!("invalid quadrature spec {self:?}")));
        }
        Ok(())
    }

    fn doubled(&self) -> Self {
        Self {
            points: 2 * self.points,
            ..*self
        }
    }
}

/// A reference value with its node-doubling error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone)]
struct FxTable {
    z: Vec<f64>,
    weights: Vec<f64>,
    /// exact FX quantiles `g₁(z)`
    level: Vec<f64>,
    /// `g₁(z)·σ_X(g₁(z), t)`
    level_vol: Vec<f64>,
    step: f64,
}

/// Exact quantile maps joined by a Gaussian copula, integrated numerically. No
/// polynomial approximation is involved.
#[derive(Debug, Clone)]
pub struct CopulaOracle {
    market: MarketData,
    expiry: f64,
    spec: QuadratureSpec,
    equity: MarginalDistribution,
    fx: MarginalDistribution,
    tables: [FxTable; 2],
    saturated_nodes: usize,
}

impl CopulaOracle {
    pub fn new(market: &MarketData, expiry: f64, spec: QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        let equity = market.equity.marginal(expiry)?;
        let fx = market.fx.marginal(expiry)?;
        let mut saturated = 0;
        let mut build = |s: QuadratureSpec| -> Result<FxTable> {
            let n = s.points;
            let step = 2.0 * s.z_max / (n - 1) as f64;
            let mut t = FxTable {
                z: Vec::with_capacity(n),
                weights: Vec::with_capacity(n),
                level: Vec::with_capacity(n),
                level_vol: Vec::with_capacity(n),
                step,
            };
            for j in 0..n {
                let z = -s.z_max + step * j as f64;
                let q = fx.quantile_at_score(z)?;
                if q.saturated.is_some() {
                    saturated += 1;
                }
                let vol = market.fx.local_vol_on(fx.slice(), q.strike)?;
                t.z.push(z);
                t.weights.push(if j == 0 || j == n - 1 { 0.5 * step } else { step });
                t.level.push(q.strike);
                t.level_vol.push(q.strike * vol);
            }
            Ok(t)
        };
        let tables = [build(spec)?, build(spec.doubled())?];
        Ok(Self {
            market: market.clone(),
            expiry,
            spec,
            equity,
            fx,
            tables,
            saturated_nodes: saturated,
        })
    }

    /// Number of tabulated FX nodes that fell beyond the strike bounds.
    pub fn saturated_nodes(&self) -> usize {
        self.saturated_nodes
    }

    pub fn expiry(&self) -> f64 {
        self.expiry
    }

    /// `E[f(Z₁) | Z₂ = z]` for a tabulated `f`, with `Z₁ | z ~ N(ρz, 1 − ρ²)`.
    fn conditional(&self, level: usize, z: f64, with_vol: bool) -> Result<f64> {
        let t = &self.tables[level];
        let rho = self.market.setup.rho;
        let s = (1.0 - rho * rho).max(0.0).sqrt();
        let mean = rho * z;
        if s >= 8.0 * t.step {
            let values = if with_vol { &t.level_vol } else { &t.level };
            let inv = 1.0 / s;
            let mut acc = 0.0;
            for ((zj, wj), vj) in t.z.iter().zip(&t.weights).zip(values) {
                let u = (zj - mean) * inv;
                if u.abs() < 40.0 {
                    acc += wj * vj * normal::pdf(u);
                }
            }
            return Ok(acc * inv);
        }
        // near-perfect correlation: integrate the conditional law directly
        let n = if level == 0 { 96 } else { 192 };
        let (x, w) = gauss_legendre(n);
        let mut acc = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            let u = xi * self.spec.z_max;
            let q = self.fx.quantile_at_score(mean + s * u)?.strike;
            let v = if with_vol {
                q * self.market.fx.local_vol_on(self.fx.slice(), q)?
            } else {
                q
            };
            acc += wi * self.spec.z_max * v * normal::pdf(u);
        }
        Ok(acc)
    }

    fn outer_rule(&self, level: usize, lo: f64) -> (Vec<f64>, Vec<f64>) {
        let points = self.tables[level].z.len();
        let panels = (points / PANEL_POINTS).max(1);
        composite_legendre(lo, self.spec.z_max, panels, PANEL_POINTS)
    }

    fn price_level(&self, level: usize, strike: f64, kappa: f64) -> Result<f64> {
        let lo = kappa.max(-self.spec.z_max);
        if lo >= self.spec.z_max {
            return Ok(0.0);
        }
        let (nodes, weights) = self.outer_rule(level, lo);
        let mut acc = 0.0;
        for (z, w) in nodes.iter().zip(&weights) {
            let s = self.equity.quantile_at_score(*z)?.strike;
            let payoff = (s - strike).max(0.0);
            if payoff > 0.0 {
                acc += w * self.conditional(level, *z, false)? * payoff * normal::pdf(*z);
            }
        }
        let setup = &self.market.setup;
        Ok(setup.df_foreign(self.expiry) / setup.spot_fx * acc)
    }

    /// Domestic price of the quanto call, `(B_F/X₀) E_F[X_T (S_T − K)₊]`.
    pub fn quanto_price(&self, strike: f64) -> Result<OracleEstimate> {
        if !(strike > 0.0 && strike.is_finite()) {
            return Err(Error::InvalidInput(format!("strike must be positive, got {strike}")));
        }
        let kappa = self.equity.normal_score(strike)?;
        let coarse = self.price_level(0, strike, kappa)?;
        let fine = self.price_level(1, strike, kappa)?;
        Ok(OracleEstimate {
            value: fine,
            error: (fine - coarse).abs(),
        })
    }

    fn forward_level(&self, level: usize) -> Result<f64> {
        let (nodes, weights) = self.outer_rule(level, -self.spec.z_max);
        let (mut num, mut den) = (0.0, 0.0);
        for (z, w) in nodes.iter().zip(&weights) {
            let s = self.equity.quantile_at_score(*z)?.strike;
            let x = self.conditional(level, *z, false)? * w * normal::pdf(*z);
            num += x * s;
            den += x;
        }
        Ok(num / den)
    }

    /// Quanto forward `E_F[X_T S_T] / E_F[X_T]`, both integrals by quadrature.
    pub fn quanto_forward(&self) -> Result<OracleEstimate> {
        let coarse = self.forward_level(0)?;
        let fine = self.forward_level(1)?;
        Ok(OracleEstimate {
            value: fine,
            error: (fine - coarse).abs(),
        })
    }

    /// `E_F[X_T/X₀ | S_T = S]`.
    pub fn conditional_fx(&self, spot: f64) -> Result<f64> {
        let z = self.equity.normal_score(spot)?;
        Ok(self.conditional(1, z, false)? / self.market.setup.spot_fx)
    }

    /// `E_D[σ_X(X_t, t) | S_t = S] = E_F[X_t σ_X | S] / E_F[X_t | S]`.
    pub fn conditional_fx_vol(&self, spot: f64) -> Result<f64> {
        let z = self.equity.normal_score(spot)?;
        Ok(self.conditional(1, z, true)? / self.conditional(1, z, false)?)
    }
}

/// Copula reference price of a quanto call (domestic, discounted).
pub fn copula_quanto_price(market: &MarketData, expiry: f64, strike: f64, spec: QuadratureSpec) -> Result<OracleEstimate> {
    CopulaOracle::new(market, expiry, spec)?.quanto_price(strike)
}

/// Copula reference quanto forward.
pub fn copula_quanto_forward(market: &MarketData, expiry: f64, spec: QuadratureSpec) -> Result<OracleEstimate> {
    CopulaOracle::new(market, expiry, spec)?.quanto_forward()
}

/// Reference curve `E_F[X_T/X₀ | S_T = S]`.
pub fn exact_conditional_fx(market: &MarketData, expiry: f64, spot: f64) -> Result<f64> {
    CopulaOracle::new(market, expiry, QuadratureSpec::default())?.conditional_fx(spot)
}
