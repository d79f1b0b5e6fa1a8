use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Asset, MarketSetup, Pillar, VolSurface};
use crate::error::{Error, Result};

/// One surface entry in a market-data document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub asset: Asset,
    pub pillars: Vec<Pillar>,
}

/// Serialized form of a market-data document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketFile {
    pub setup: MarketSetup,
    pub surfaces: Vec<SurfaceSpec>,
}

/// Validated market: rates, correlation and the two surfaces.
#[derive(Debug, Clone)]
pub struct MarketData {
    pub setup: MarketSetup,
    pub equity: Arc<VolSurface>,
    pub fx: Arc<VolSurface>,
}

impl MarketData {
    pub fn new(setup: MarketSetup, equity: VolSurface, fx: VolSurface) -> Result<Self> {
        setup.validate()?;
        if equity.asset() != Asset::Equity || fx.asset() != Asset::Fx {
            return Err(Error::InvalidInput("surface asset tags do not match their roles".into()));
        }
        let consistent = |s: &VolSurface, a: Asset| {
            (s.spot() - setup.spot(a)).abs() <= 1e-12 * setup.spot(a)
                && (s.carry() - setup.carry(a)).abs() <= 1e-14
        };
        if !consistent(&equity, Asset::Equity) || !consistent(&fx, Asset::Fx) {
            return Err(Error::InvalidInput(
                "surface spot or carry inconsistent with the market setup".into(),
            ));
        }
        Ok(Self {
            setup,
            equity: Arc::new(equity),
            fx: Arc::new(fx),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MarketFile = serde_json::from_str(text).map_err(|e| Error::Schema {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_market_file(&file)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidInput(format!("cannot read market file {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn from_market_file(file: &MarketFile) -> Result<Self> {
        file.setup.validate()?;
        let pick = |asset: Asset| -> Result<&SurfaceSpec> {
            let mut found = file.surfaces.iter().filter(|s| s.asset == asset);
            match (found.next(), found.next()) {
                (Some(s), None) => Ok(s),
                (None, _) => Err(Error::InvalidInput(format!(
                    "market file has no {} surface",
                    asset.label()
                ))),
                (Some(_), Some(_)) => Err(Error::InvalidInput(format!(
                    "market file has more than one {} surface",
                    asset.label()
                ))),
            }
        };
        let eq = pick(Asset::Equity)?;
        let fx = pick(Asset::Fx)?;
        Self::new(
            file.setup,
            VolSurface::from_setup(&file.setup, Asset::Equity, &eq.pillars)?,
            VolSurface::from_setup(&file.setup, Asset::Fx, &fx.pillars)?,
        )
    }

    pub fn to_market_file(&self) -> MarketFile {
        MarketFile {
            setup: self.setup,
            surfaces: vec![
                SurfaceSpec {
                    asset: Asset::Equity,
                    pillars: self.equity.pillars().to_vec(),
                },
                SurfaceSpec {
                    asset: Asset::Fx,
                    pillars: self.fx.pillars().to_vec(),
                },
            ],
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_market_file()).expect("market file serializes")
    }

    /// Same surfaces with a different correlation.
    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        let setup = self.setup.with_rho(rho);
        setup.validate()?;
        Ok(Self {
            setup,
            equity: Arc::clone(&self.equity),
            fx: Arc::clone(&self.fx),
        })
    }
}
