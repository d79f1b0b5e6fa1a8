//! Quanto calls as vanilla calls plus a quanto-vanilla spread priced in closed form.
//!
//! With `X` in foreign units per domestic unit, the domestic price of a quanto call is
//! `C^Q = (B_F/X₀)·E_F[X_T (S_T − K)₊]`. Writing `X_T = X₀ + (X_T − X₀)` splits it into
//! the vanilla `E_F[(S_T − K)₊]`, taken exactly from the equity surface, and the spread
//! `Ĉ^{QS} = E_F[(X_T − X₀)(S_T − K)₊]`. Under the Gaussian copula,
//! `E[X_T | Z_S = z]` is the polynomial `b(z)` and `S_T = â₂(z)`, so the spread is
//! `Σ e_n m_n(κ) · (1 − Φ(κ))` with `e = (b − X₀)(â₂ − K)` and `κ = Φ⁻¹(F_S(K))`.

mod moments;

use std::sync::Arc;

use crate::black;
use crate::collocation::{
    condition_with_table, convolve, hermite_nodes, node_quantiles, ConditionalMomentTable, PolyCoeffs,
};
use crate::error::{ensure_positive, Error, Result};
use crate::market_surface::{Asset, MarginalDistribution, MarketData, MarketSetup, VolSurface};
use crate::normal;

pub use moments::{truncated_moments, TruncatedMoments, MAX_KAPPA, MAX_MOMENTS};

/// Truncation scores beyond which the spread is clamped (below) or zeroed (above).
pub const KAPPA_CLAMP: f64 = 8.0;

/// Correlation range searched by [`implied_correlation`].
pub const RHO_SEARCH: (f64, f64) = (-0.999, 0.999);

/// How the truncation point of a strike was treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailRegime {
    Interior,
    /// `κ < −8`: the strike is below essentially all of the mass; `κ` is clamped to −8.
    ClampedItm,
    /// `κ > 8`: the spread is below double-precision survival and reported as zero.
    DeepOtm,
}

/// Undiscounted quanto-vanilla spread at one strike.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadValue {
    /// `E_F[(X_T − X₀)(S_T − K)₊]` in foreign currency times FX units.
    pub value: f64,
    pub kappa: f64,
    pub tail: TailRegime,
}

/// Price of a quanto call and its components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantoPrice {
    pub strike: f64,
    /// Domestic-currency discounted price `C^Q`.
    pub price: f64,
    /// Undiscounted foreign-measure vanilla `E_F[(S_T − K)₊]`.
    pub vanilla: f64,
    /// Undiscounted spread `E_F[(X_T − X₀)(S_T − K)₊]`.
    pub spread: f64,
    /// Quanto forward `E_D[S_T]` implied by the same context.
    pub quanto_forward: f64,
    pub kappa: f64,
    pub tail: TailRegime,
}

/// Worst slope of the fitted collocation maps over `z ∈ [−4, 4]` (negative means the
/// polynomial is not monotone there; pricing proceeds regardless).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitDiagnostics {
    pub min_slope_fx: f64,
    pub min_slope_equity: f64,
}

/// Strike-independent pricing state for one maturity.
#[derive(Debug, Clone)]
pub struct QuantoContext {
    expiry: f64,
    setup: MarketSetup,
    equity: MarginalDistribution,
    fx: MarginalDistribution,
    fx_nodes: Vec<f64>,
    equity_nodes: Vec<f64>,
    a1: PolyCoeffs,
    a2: PolyCoeffs,
    b: PolyCoeffs,
    c: PolyCoeffs,
    fx_forward: f64,
    equity_forward: f64,
    df_domestic: f64,
    df_foreign: f64,
    diagnostics: FitDiagnostics,
}

/// Builds the pricing context for maturity `expiry` with orders `n1` (FX) and `n2`
/// (equity).
pub fn build_context(market: &MarketData, expiry: f64, n1: usize, n2: usize) -> Result<QuantoContext> {
    QuantoContext::new(&market.setup, &market.equity, &market.fx, expiry, n1, n2)
}

impl QuantoContext {
    pub fn new(
        setup: &MarketSetup,
        equity: &Arc<VolSurface>,
        fx: &Arc<VolSurface>,
        expiry: f64,
        n1: usize,
        n2: usize,
    ) -> Result<Self> {
        setup.validate()?;
        ensure_positive(expiry, "maturity")?;
        if equity.asset() != Asset::Equity || fx.asset() != Asset::Fx {
            return Err(Error::InvalidInput("surface asset tags do not match their roles".into()));
        }
        let fx_dist = fx.marginal(expiry)?;
        let equity_dist = equity.marginal(expiry)?;
        let basis1 = hermite_nodes(n1)?;
        let basis2 = if n2 == n1 { basis1.clone() } else { hermite_nodes(n2)? };
        let fx_nodes = node_quantiles(&fx_dist, &basis1)?;
        let equity_nodes = node_quantiles(&equity_dist, &basis2)?;
        let a1 = basis1.solve(&fx_nodes)?;
        let a2 = basis2.solve(&equity_nodes)?;
        let (b, c) = Self::combine(&a1, &a2, setup.rho)?;
        let diagnostics = FitDiagnostics {
            min_slope_fx: a1.min_slope(-4.0, 4.0, 801),
            min_slope_equity: a2.min_slope(-4.0, 4.0, 801),
        };
        Ok(Self {
            expiry,
            setup: *setup,
            fx_forward: fx_dist.forward(),
            equity_forward: equity_dist.forward(),
            equity: equity_dist,
            fx: fx_dist,
            fx_nodes,
            equity_nodes,
            a1,
            a2,
            b,
            c,
            df_domestic: setup.df_domestic(expiry),
            df_foreign: setup.df_foreign(expiry),
            diagnostics,
        })
    }

    fn combine(a1: &PolyCoeffs, a2: &PolyCoeffs, rho: f64) -> Result<(PolyCoeffs, PolyCoeffs)> {
        let table = ConditionalMomentTable::new(a1.degree(), rho)?;
        let b = condition_with_table(a1, &table);
        let c = convolve(a2, &b);
        Ok((b, c))
    }

    /// Same fitted marginals with a different correlation; only `b` and `c` change.
    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        let setup = self.setup.with_rho(rho);
        setup.validate()?;
        let (b, c) = Self::combine(&self.a1, &self.a2, rho)?;
        Ok(Self {
            setup,
            b,
            c,
            ..self.clone()
        })
    }

    pub fn expiry(&self) -> f64 {
        self.expiry
    }

    pub fn setup(&self) -> &MarketSetup {
        &self.setup
    }

    pub fn rho(&self) -> f64 {
        self.setup.rho
    }

    pub fn n1(&self) -> usize {
        self.a1.len()
    }

    pub fn n2(&self) -> usize {
        self.a2.len()
    }

    pub fn a1(&self) -> &PolyCoeffs {
        &self.a1
    }

    pub fn a2(&self) -> &PolyCoeffs {
        &self.a2
    }

    pub fn b(&self) -> &PolyCoeffs {
        &self.b
    }

    pub fn c(&self) -> &PolyCoeffs {
        &self.c
    }

    /// FX quantiles at the FX collocation nodes.
    pub fn fx_nodes(&self) -> &[f64] {
        &self.fx_nodes
    }

    /// Equity quantiles at the equity collocation nodes.
    pub fn equity_nodes(&self) -> &[f64] {
        &self.equity_nodes
    }

    pub fn equity_marginal(&self) -> &MarginalDistribution {
        &self.equity
    }

    pub fn fx_marginal(&self) -> &MarginalDistribution {
        &self.fx
    }

    /// Foreign-measure forwards `(E_F[S_T], E_F[X_T])`.
    pub fn forwards(&self) -> (f64, f64) {
        (self.equity_forward, self.fx_forward)
    }

    /// Discount factors `(B_D, B_F)`.
    pub fn discount_factors(&self) -> (f64, f64) {
        (self.df_domestic, self.df_foreign)
    }

    pub fn diagnostics(&self) -> FitDiagnostics {
        self.diagnostics
    }

    /// `e_n = c_n − K b_n 1{n<N₁} − X₀ a₂,n 1{n<N₂} + X₀ K 1{n=0}`.
    pub fn spread_coeffs(&self, strike: f64) -> Vec<f64> {
        let x0 = self.setup.spot_fx;
        let mut e = self.c.coeffs().to_vec();
        for (en, bn) in e.iter_mut().zip(self.b.coeffs()) {
            *en -= strike * bn;
        }
        for (en, an) in e.iter_mut().zip(self.a2.coeffs()) {
            *en -= x0 * an;
        }
        e[0] += x0 * strike;
        e
    }

    /// Undiscounted quanto-vanilla spread `E_F[(X_T − X₀)(S_T − K)₊]`.
    pub fn quanto_vanilla_spread(&self, strike: f64) -> Result<SpreadValue> {
        self.equity.surface().check_domain(self.equity.slice(), strike)?;
        let score = self.equity.normal_score(strike)?;
        let (kappa, tail) = if score > KAPPA_CLAMP {
            return Ok(SpreadValue {
                value: 0.0,
                kappa: score,
                tail: TailRegime::DeepOtm,
            });
        } else if score < -KAPPA_CLAMP {
            (-KAPPA_CLAMP, TailRegime::ClampedItm)
        } else {
            (score, TailRegime::Interior)
        };
        let e = self.spread_coeffs(strike);
        let m = TruncatedMoments::new(kappa, e.len())?;
        let sum: f64 = e.iter().zip(m.moments()).map(|(e, m)| e * m).sum();
        Ok(SpreadValue {
            value: sum * m.survival(),
            kappa,
            tail,
        })
    }

    /// Domestic-currency price of the quanto call struck at `strike`.
    pub fn quanto_call(&self, strike: f64) -> Result<QuantoPrice> {
        let spread = self.quanto_vanilla_spread(strike)?;
        let vanilla = self.equity.surface().call_price_on(self.equity.slice(), strike)?;
        let x0 = self.setup.spot_fx;
        let price = (self.df_foreign / x0 * (spread.value + x0 * vanilla)).max(0.0);
        Ok(QuantoPrice {
            strike,
            price,
            vanilla,
            spread: spread.value,
            quanto_forward: self.quanto_forward(),
            kappa: spread.kappa,
            tail: spread.tail,
        })
    }

    /// Quanto calls at many strikes sharing this context.
    pub fn price_strikes(&self, strikes: &[f64]) -> Vec<Result<QuantoPrice>> {
        strikes.iter().map(|&k| self.quanto_call(k)).collect()
    }

    /// Quanto forward `E_D[S_T] = E_F[X_T S_T]/E_F[X_T]`, the zero-strike limit of the
    /// call: `(Σ (c_n − X₀ a₂,n) μ_n + X₀ F_S) / F_X` with `μ_n` the normal raw moments.
    pub fn quanto_forward(&self) -> f64 {
        Self::forward_from(&self.c, &self.a2, self.setup.spot_fx, self.equity_forward, self.fx_forward)
    }

    fn forward_from(c: &PolyCoeffs, a2: &PolyCoeffs, x0: f64, fs: f64, fx: f64) -> f64 {
        let cross: f64 = c
            .coeffs()
            .iter()
            .enumerate()
            .map(|(n, &cn)| {
                let an = a2.coeffs().get(n).copied().unwrap_or(0.0);
                (cn - x0 * an) * normal::raw_moment(n)
            })
            .sum();
        (cross + x0 * fs) / fx
    }

    /// Quanto forward at another correlation without rebuilding the marginals.
    pub fn quanto_forward_at(&self, rho: f64) -> Result<f64> {
        let (_, c) = Self::combine(&self.a1, &self.a2, rho)?;
        Ok(Self::forward_from(&c, &self.a2, self.setup.spot_fx, self.equity_forward, self.fx_forward))
    }

    /// Black implied vol of a quanto price against this context's quanto forward.
    pub fn implied_vol(&self, price: &QuantoPrice) -> Result<f64> {
        implied_vol_of(price.price / self.df_domestic, price.quanto_forward, price.strike, self.expiry)
    }
}

/// Black implied vol of an undiscounted price.
pub fn implied_vol_of(price: f64, forward: f64, strike: f64, expiry: f64) -> Result<f64> {
    black::implied_vol(price, forward, strike, expiry)
}

/// Result of a correlation calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationFit {
    pub rho: f64,
    pub forward: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Correlation at which the collocation quanto forward equals `target`.
///
/// A 9-point scan over `[−0.999, 0.999]` checks monotonicity and brackets the root,
/// which is then refined by Illinois-modified secant steps with bisection fallback
/// until `|F^Q(ρ) − target| ≤ 1e−10·target`.
pub fn implied_correlation(market: &MarketData, expiry: f64, target: f64, n1: usize, n2: usize) -> Result<CorrelationFit> {
    ensure_positive(target, "target quanto forward")?;
    let ctx = build_context(market, expiry, n1, n2)?;
    calibrate_rho(&ctx, target)
}

/// Correlation calibration on an existing context.
pub fn calibrate_rho(ctx: &QuantoContext, target: f64) -> Result<CorrelationFit> {
    ensure_positive(target, "target quanto forward")?;
    const SCAN: usize = 9;
    let (lo, hi) = RHO_SEARCH;
    let grid: Vec<f64> = (0..SCAN).map(|i| lo + (hi - lo) * i as f64 / (SCAN - 1) as f64).collect();
    let values = grid
        .iter()
        .map(|&r| ctx.quanto_forward_at(r))
        .collect::<Result<Vec<f64>>>()?;
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    if !increasing && !decreasing {
        return Err(Error::NonMonotoneForward);
    }
    let (fmin, fmax) = if increasing {
        (values[0], values[SCAN - 1])
    } else {
        (values[SCAN - 1], values[0])
    };
    let tol = 1e-10 * target;
    if target < fmin - tol || target > fmax + tol {
        return Err(Error::UnattainableForward {
            target,
            lo: fmin,
            hi: fmax,
        });
    }
    let seg = (0..SCAN - 1)
        .find(|&i| {
            let (a, b) = (values[i] - target, values[i + 1] - target);
            a == 0.0 || b == 0.0 || a.signum() != b.signum()
        })
        .unwrap_or(if (values[0] - target).abs() < (values[SCAN - 1] - target).abs() { 0 } else { SCAN - 2 });
    let (mut a, mut b) = (grid[seg], grid[seg + 1]);
    let (mut fa, mut fb) = (values[seg] - target, values[seg + 1] - target);
    for (r, f) in [(a, fa), (b, fb)] {
        if f.abs() <= tol {
            return Ok(CorrelationFit {
                rho: r,
                forward: f + target,
                residual: f,
                iterations: 0,
            });
        }
    }
    // Illinois: secant on the bracket, halving the weight of a stale endpoint.
    let mut side = 0i8;
    for iter in 1..=200 {
        let mut r = (a * fb - b * fa) / (fb - fa);
        if !(r > a.min(b) && r < a.max(b)) {
            r = 0.5 * (a + b);
        }
        let f = ctx.quanto_forward_at(r)? - target;
        if f.abs() <= tol || (b - a).abs() <= 4.0 * f64::EPSILON {
            return Ok(CorrelationFit {
                rho: r,
                forward: f + target,
                residual: f,
                iterations: iter,
            });
        }
        if f.signum() == fb.signum() {
            b = r;
            fb = f;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = r;
            fa = f;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::NoConvergence("implied correlation".into()))
}

/// Legacy ad-hoc quanto price: Black with the equity smile vol at `K` and the forward
/// shifted by the constant `ρ σ_S^ATM σ_X^ATM`, discounted domestically.
pub fn adhoc_quanto_price(market: &MarketData, expiry: f64, strike: f64) -> Result<f64> {
    let fwd = adhoc_forward(market, expiry)?;
    let vol = market.equity.implied_vol(strike, expiry)?;
    Ok(market.setup.df_domestic(expiry) * black::call(fwd, strike, vol, expiry))
}

/// Forward used by [`adhoc_quanto_price`].
pub fn adhoc_forward(market: &MarketData, expiry: f64) -> Result<f64> {
    let atm_s = market.equity.atm_vol(expiry)?;
    let atm_x = market.fx.atm_vol(expiry)?;
    let fs = market.setup.forward(Asset::Equity, expiry)?;
    Ok(fs * (market.setup.rho * atm_s * atm_x * expiry).exp())
}
