use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quanto_collocation::collocation::{DEFAULT_ORDER, MAX_ORDER, MIN_ORDER};
use quanto_collocation::local_drift::MAX_DRIFT_ORDER;
use quanto_collocation::market_surface::synthetic::SkewScenario;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "qcoll", version, about = "Quanto option pricing with equity and FX smiles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Price quanto calls on a maturity × strike grid.
    Price(PriceArgs),
    /// Calibrate the Equity-FX correlation to a quanto forward.
    CalibrateRho(CalibrateArgs),
    /// Export the projected quanto drift ρ σ_S σ_XS on a (spot, time) grid.
    DriftGrid(DriftArgs),
    /// Time the pricing recipe on the standard batch shapes.
    Bench(BenchArgs),
    /// Write a synthetic market file.
    Synthetic(SyntheticArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    Copula,
    Mc,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    Flat,
    PositiveBoth,
    NegativeEquity,
    Mixed,
}

impl Scenario {
    pub fn skew(self) -> Option<SkewScenario> {
        match self {
            Scenario::Flat => None,
            Scenario::PositiveBoth => Some(SkewScenario::PositiveBoth),
            Scenario::NegativeEquity => Some(SkewScenario::NegativeEquity),
            Scenario::Mixed => Some(SkewScenario::Mixed),
        }
    }
}

#[derive(Debug, Args)]
pub struct MarketArgs {
    /// Market-data JSON file.
    #[arg(long, env = "QCOLL_MARKET")]
    pub market: PathBuf,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file (standard output when absent).
    #[arg(long, env = "QCOLL_OUT")]
    pub out: Option<PathBuf>,
    /// Emit JSON records instead of CSV.
    #[arg(long, env = "QCOLL_JSON")]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Comma-separated maturities in years.
    #[arg(long, env = "QCOLL_MATURITIES", value_delimiter = ',', required = true)]
    pub maturities: Vec<f64>,
    /// Comma-separated strikes (or spots) in percent of spot.
    #[arg(long, env = "QCOLL_STRIKES", value_delimiter = ',', required = true)]
    pub strikes: Vec<f64>,
    /// Read strikes as absolute levels.
    #[arg(long, env = "QCOLL_ABSOLUTE_STRIKES")]
    pub absolute_strikes: bool,
}

#[derive(Debug, Args)]
pub struct PriceArgs {
    #[command(flatten)]
    pub market: MarketArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Collocation order of the FX marginal.
    #[arg(long, env = "QCOLL_N1", default_value_t = DEFAULT_ORDER)]
    pub n1: usize,
    /// Collocation order of the equity marginal.
    #[arg(long, env = "QCOLL_N2", default_value_t = DEFAULT_ORDER)]
    pub n2: usize,
    /// Reference price columns.
    #[arg(long, env = "QCOLL_ORACLE", value_enum, default_value_t = OracleKind::None)]
    pub oracle: OracleKind,
    /// Monte Carlo seed.
    #[arg(long, env = "QCOLL_SEED", default_value_t = 20_170_901)]
    pub seed: u64,
    /// Monte Carlo paths.
    #[arg(long, env = "QCOLL_PATHS", default_value_t = 1 << 18)]
    pub paths: usize,
    /// Price maturities on parallel workers.
    #[arg(long, env = "QCOLL_PARALLEL")]
    pub parallel: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub market: MarketArgs,
    /// Comma-separated maturities in years.
    #[arg(long, env = "QCOLL_MATURITIES", value_delimiter = ',', required = true)]
    pub maturities: Vec<f64>,
    /// Target quanto forwards, one per maturity.
    #[arg(long, env = "QCOLL_TARGET_FORWARD", value_delimiter = ',', required = true)]
    pub target_forward: Vec<f64>,
    #[arg(long, env = "QCOLL_N1", default_value_t = DEFAULT_ORDER)]
    pub n1: usize,
    #[arg(long, env = "QCOLL_N2", default_value_t = DEFAULT_ORDER)]
    pub n2: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DriftArgs {
    #[command(flatten)]
    pub market: MarketArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Collocation order of the drift slices.
    #[arg(long, env = "QCOLL_NT", default_value_t = DEFAULT_ORDER)]
    pub nt: usize,
    /// Reference column (`copula` or `none`).
    #[arg(long, env = "QCOLL_ORACLE", value_enum, default_value_t = OracleKind::None)]
    pub oracle: OracleKind,
    #[arg(long, env = "QCOLL_PARALLEL")]
    pub parallel: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Market-data JSON file (synthetic negative-equity market when absent).
    #[arg(long, env = "QCOLL_MARKET")]
    pub market: Option<PathBuf>,
    #[arg(long, env = "QCOLL_N1", default_value_t = DEFAULT_ORDER)]
    pub n1: usize,
    #[arg(long, env = "QCOLL_N2", default_value_t = DEFAULT_ORDER)]
    pub n2: usize,
    /// Timed repetitions per row (at least 10).
    #[arg(long, env = "QCOLL_REPS", default_value_t = 20)]
    pub reps: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SyntheticArgs {
    #[arg(long, value_enum, default_value_t = Scenario::NegativeEquity)]
    pub scenario: Scenario,
    #[arg(long, default_value_t = 0.7, allow_negative_numbers = true)]
    pub rho: f64,
    /// Output file (standard output when absent).
    #[arg(long, env = "QCOLL_OUT")]
    pub out: Option<PathBuf>,
}

/// Validated grid shared by the pricing-style commands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub maturities: Vec<f64>,
    pub strikes: Vec<f64>,
    pub absolute_strikes: bool,
}

impl RunConfig {
    pub fn from_grid(grid: &GridArgs) -> Result<Self, CliError> {
        if grid.maturities.is_empty() || grid.strikes.is_empty() {
            return Err(CliError::Usage("maturities and strikes must be non-empty".into()));
        }
        if let Some(t) = grid.maturities.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(CliError::Usage(format!("maturity {t} must be positive")));
        }
        if let Some(k) = grid.strikes.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
            return Err(CliError::Usage(format!("strike {k} must be positive")));
        }
        Ok(Self {
            maturities: grid.maturities.clone(),
            strikes: grid.strikes.clone(),
            absolute_strikes: grid.absolute_strikes,
        })
    }

    /// Strikes as absolute levels.
    pub fn strike_levels(&self, spot: f64) -> Vec<f64> {
        if self.absolute_strikes {
            self.strikes.clone()
        } else {
            self.strikes.iter().map(|p| p / 100.0 * spot).collect()
        }
    }
}

pub fn check_orders(orders: &[(usize, &str)], max: usize) -> Result<(), CliError> {
    for &(n, name) in orders {
        if !(MIN_ORDER..=max).contains(&n) {
            return Err(CliError::Usage(format!("{name} = {n} outside [{MIN_ORDER}, {max}]")));
        }
    }
    Ok(())
}

pub const MAX_PRICING_ORDER: usize = MAX_ORDER;
pub const MAX_NT: usize = MAX_DRIFT_ORDER;
