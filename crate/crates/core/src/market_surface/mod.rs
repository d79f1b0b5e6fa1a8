//! Market inputs: rates, spots, correlation and per-asset implied volatility surfaces.
//!
//! A [`VolSurface`] is a set of parametric smile pillars with total-variance
//! interpolation in time. From it we derive undiscounted call prices, the marginal
//! distribution of the asset at a maturity ([`MarginalDistribution`]), and Dupire
//! local volatility.

mod data;
mod marginal;
mod surface;
pub mod synthetic;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};

pub use data::{MarketData, MarketFile, SurfaceSpec};
pub use marginal::{MarginalDistribution, QuantileValue, TailSide};
pub use surface::{Pillar, Slice, SmileParams, VarianceSample, VolSurface};

/// Which of the two underlyings a surface describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Asset {
    #[serde(rename = "EQ")]
    Equity,
    #[serde(rename = "FX")]
    Fx,
}

impl Asset {
    pub fn label(self) -> &'static str {
        match self {
            Asset::Equity => "EQ",
            Asset::Fx => "FX",
        }
    }
}

/// Flat rates, spots and the Equity-FX correlation.
///
/// The FX rate is quoted as units of the foreign (equity) currency per one unit of
/// the domestic (payoff) currency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketSetup {
    #[serde(rename = "spot_S")]
    pub spot_equity: f64,
    #[serde(rename = "spot_X")]
    pub spot_fx: f64,
    #[serde(rename = "r_F")]
    pub rate_foreign: f64,
    #[serde(rename = "r_D")]
    pub rate_domestic: f64,
    pub div_yield: f64,
    pub rho: f64,
}

impl MarketSetup {
    pub fn new(
        spot_equity: f64,
        spot_fx: f64,
        rate_foreign: f64,
        rate_domestic: f64,
        div_yield: f64,
        rho: f64,
    ) -> Result<Self> {
        let setup = Self {
            spot_equity,
            spot_fx,
            rate_foreign,
            rate_domestic,
            div_yield,
            rho,
        };
        setup.validate()?;
        Ok(setup)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive(self.spot_equity, "spot_S")?;
        ensure_positive(self.spot_fx, "spot_X")?;
        ensure_finite(self.rate_foreign, "r_F")?;
        ensure_finite(self.rate_domestic, "r_D")?;
        ensure_finite(self.div_yield, "div_yield")?;
        if !(self.rho.abs() <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "rho must lie in [-1, 1], got {}",
                self.rho
            )));
        }
        Ok(())
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    pub fn spot(&self, asset: Asset) -> f64 {
        match asset {
            Asset::Equity => self.spot_equity,
            Asset::Fx => self.spot_fx,
        }
    }

    /// Foreign-measure drift of the asset.
    pub fn carry(&self, asset: Asset) -> f64 {
        match asset {
            Asset::Equity => self.rate_foreign - self.div_yield,
            Asset::Fx => self.rate_foreign - self.rate_domestic,
        }
    }

    /// Foreign-measure forward `E_F[S_T]` or `E_F[X_T]`.
    pub fn forward(&self, asset: Asset, expiry: f64) -> Result<f64> {
        if !(expiry >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "maturity must be non-negative, got {expiry}"
            )));
        }
        Ok(self.spot(asset) * (self.carry(asset) * expiry).exp())
    }

    pub fn df_domestic(&self, expiry: f64) -> f64 {
        (-self.rate_domestic * expiry).exp()
    }

    pub fn df_foreign(&self, expiry: f64) -> f64 {
        (-self.rate_foreign * expiry).exp()
    }
}
