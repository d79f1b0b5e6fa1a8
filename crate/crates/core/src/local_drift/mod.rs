//! Markovian-projected quanto drift for one-factor equity local-vol engines.
//!
//! Under the domestic measure the equity carries the drift `ρ σ_S(S,t) σ_X(X,t)`.
//! Projecting onto `S_t` replaces `σ_X(X_t,t)` by its conditional expectation
//! `σ_XS(S,t) = E_D[σ_X(X_t,t) | S_t = S]`. The domestic measure has density
//! `X_t/E_F[X_t]` with respect to the foreign one, so
//! `σ_XS = E_F[ν(Z_X) | Z_S = z] / E_F[X_t/E_F[X_t] | Z_S = z]` with
//! `ν = X_t σ_X(X_t,t)/E_F[X_t]` and `z = Φ⁻¹(F_S(S))`. Both conditional expectations
//! are polynomials in `z` obtained by conditioning collocation fits at the nodes.

use std::sync::Arc;

use crate::collocation::{condition_coeffs, hermite_nodes, node_quantiles, CollocationBasis, PolyCoeffs};
use crate::error::{ensure_positive, Error, Result};
use crate::market_surface::{MarginalDistribution, MarketData, MarketSetup, VolSurface};

/// Largest collocation order for drift slices.
pub const MAX_DRIFT_ORDER: usize = 10;
/// Floor applied to the conditional FX vol.
pub const VOL_FLOOR: f64 = 1e-6;

/// `ν_t(x_i) = g₁(x_i)/X₀ · σ_X(g₁(x_i), t) · B_F/B_D` at the basis nodes.
pub fn nu_values(fx: &Arc<VolSurface>, setup: &MarketSetup, time: f64, basis: &CollocationBasis) -> Result<Vec<f64>> {
    let dist = fx.marginal(time)?;
    let nodes = node_quantiles(&dist, basis)?;
    nu_from_nodes(fx, setup, &dist, &nodes)
}

fn nu_from_nodes(fx: &VolSurface, setup: &MarketSetup, dist: &MarginalDistribution, nodes: &[f64]) -> Result<Vec<f64>> {
    let ratio = setup.df_foreign(dist.expiry()) / setup.df_domestic(dist.expiry());
    nodes
        .iter()
        .map(|&x| Ok(x / setup.spot_fx * fx.local_vol_on(dist.slice(), x)? * ratio))
        .collect()
}

/// Conditional FX vol as a function of the equity level at one time.
#[derive(Debug, Clone)]
pub struct DriftSlice {
    time: f64,
    rho: f64,
    fx_forward: f64,
    spot_fx: f64,
    measure_ratio: f64,
    nu: Vec<f64>,
    a_t: PolyCoeffs,
    a_w: PolyCoeffs,
    b_t: PolyCoeffs,
    b_w: PolyCoeffs,
    equity: MarginalDistribution,
}

/// Fits the drift slice at time `t` with `order` collocation nodes.
pub fn fit_drift_slice(market: &MarketData, time: f64, order: usize) -> Result<DriftSlice> {
    ensure_positive(time, "time")?;
    if order > MAX_DRIFT_ORDER {
        return Err(Error::InvalidInput(format!(
            "drift collocation order {order} exceeds {MAX_DRIFT_ORDER}"
        )));
    }
    let setup = &market.setup;
    let basis = hermite_nodes(order)?;
    let fx_dist = market.fx.marginal(time)?;
    let nodes = node_quantiles(&fx_dist, &basis)?;
    let nu = nu_from_nodes(&market.fx, setup, &fx_dist, &nodes)?;
    let fx_forward = fx_dist.forward();
    let weights: Vec<f64> = nodes.iter().map(|x| x / fx_forward).collect();
    let a_t = basis.solve(&nu)?;
    let a_w = basis.solve(&weights)?;
    let b_t = condition_coeffs(&a_t, setup.rho)?;
    let b_w = condition_coeffs(&a_w, setup.rho)?;
    Ok(DriftSlice {
        time,
        rho: setup.rho,
        fx_forward,
        spot_fx: setup.spot_fx,
        measure_ratio: setup.df_foreign(time) / setup.df_domestic(time),
        nu,
        a_t,
        a_w,
        b_t,
        b_w,
        equity: market.equity.marginal(time)?,
    })
}

impl DriftSlice {
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn order(&self) -> usize {
        self.a_t.len()
    }

    /// `B_F/B_D` at the slice time.
    pub fn measure_ratio(&self) -> f64 {
        self.measure_ratio
    }

    /// `ν_t` at the collocation nodes.
    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    /// Collocation fit of `ν_t`.
    pub fn a_t(&self) -> &PolyCoeffs {
        &self.a_t
    }

    /// Conditional expectation of `ν_t` given the equity score.
    pub fn b_t(&self) -> &PolyCoeffs {
        &self.b_t
    }

    /// Conditional expectation of `X_t/E_F[X_t]` given the equity score.
    pub fn b_w(&self) -> &PolyCoeffs {
        &self.b_w
    }

    pub fn equity_marginal(&self) -> &MarginalDistribution {
        &self.equity
    }

    /// Recomputes the conditioned coefficients from the fits (for determinism checks).
    pub fn recondition(&self) -> Result<(PolyCoeffs, PolyCoeffs)> {
        Ok((condition_coeffs(&self.a_t, self.rho)?, condition_coeffs(&self.a_w, self.rho)?))
    }

    fn score(&self, spot: f64) -> Result<f64> {
        self.equity.surface().check_domain(self.equity.slice(), spot)?;
        self.equity.normal_score(spot)
    }

    /// `σ_XS` at equity score `z`, floored at [`VOL_FLOOR`].
    pub fn conditional_fx_vol_at_score(&self, z: f64) -> f64 {
        let num = self.b_t.eval(z);
        let den = self.b_w.eval(z);
        let v = num / den;
        if v > VOL_FLOOR && den > 0.0 {
            v
        } else {
            VOL_FLOOR
        }
    }

    /// `σ_XS(S, t) = E_D[σ_X(X_t, t) | S_t = S]`.
    pub fn conditional_fx_vol(&self, spot: f64) -> Result<f64> {
        Ok(self.conditional_fx_vol_at_score(self.score(spot)?))
    }

    /// Collocation estimate of `E_F[X_t/X₀ | S_t = S]`.
    pub fn conditional_fx_ratio(&self, spot: f64) -> Result<f64> {
        Ok(self.b_w.eval(self.score(spot)?) * self.fx_forward / self.spot_fx)
    }

    /// Local quanto drift `ρ σ_S(S,t) σ_XS(S,t)`.
    pub fn quanto_local_drift(&self, spot: f64) -> Result<f64> {
        let z = self.score(spot)?;
        let sigma_s = self.equity.surface().local_vol_on(self.equity.slice(), spot)?;
        Ok(self.rho * sigma_s * self.conditional_fx_vol_at_score(z))
    }

    /// Smallest values of the numerator and denominator polynomials on `z ∈ [−4, 4]`;
    /// a non-positive entry means the floor can engage inside the bulk of the law.
    pub fn positivity_diagnostic(&self) -> (f64, f64) {
        let grid = (0..=160).map(|i| -4.0 + 0.05 * i as f64);
        grid.fold((f64::INFINITY, f64::INFINITY), |(a, b), z| {
            (a.min(self.b_t.eval(z)), b.min(self.b_w.eval(z)))
        })
    }
}

/// Local quanto drift at `S` on a fitted slice.
pub fn quanto_local_drift(slice: &DriftSlice, spot: f64) -> Result<f64> {
    slice.quanto_local_drift(spot)
}

/// `ρ σ_S σ_XS` on a grid: one row per spot, one column per time.
pub fn drift_grid(market: &MarketData, times: &[f64], spots: &[f64], order: usize) -> Result<Vec<Vec<f64>>> {
    let slices = times
        .iter()
        .map(|&t| fit_drift_slice(market, t, order))
        .collect::<Result<Vec<_>>>()?;
    spots
        .iter()
        .map(|&s| slices.iter().map(|sl| sl.quanto_local_drift(s)).collect())
        .collect()
}
