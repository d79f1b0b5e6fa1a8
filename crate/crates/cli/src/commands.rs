use rayon::prelude::*;

use quanto_collocation::local_drift::fit_drift_slice;
use quanto_collocation::market_surface::synthetic::{default_setup, flat_market, skewed_market, SkewScenario};
use quanto_collocation::market_surface::MarketData;
use quanto_collocation::oracles::{mc_quanto_price, CopulaOracle, McSpec, QuadratureSpec};
use quanto_collocation::quanto_pricer::{adhoc_quanto_price, build_context, calibrate_rho, implied_vol_of, TailRegime};
use quanto_collocation::timing::table_rows;
use quanto_collocation::Error;

use crate::config::{
    check_orders, BenchArgs, CalibrateArgs, DriftArgs, OracleKind, PriceArgs, RunConfig, SyntheticArgs, MAX_NT,
    MAX_PRICING_ORDER,
};
use crate::error::CliError;
use crate::output::{Cell, Table};

fn load(path: &std::path::Path) -> Result<MarketData, CliError> {
    Ok(MarketData::from_path(path)?)
}

/// Runs `f` over the maturities in order, on worker threads when `parallel` is set.
fn per_maturity<T, F>(maturities: &[f64], parallel: bool, f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(f64) -> Result<T, CliError> + Sync,
{
    if parallel {
        maturities.par_iter().map(|&t| f(t)).collect()
    } else {
        maturities.iter().map(|&t| f(t)).collect()
    }
}

/// Black vol of an undiscounted price, NaN when the price has no implied vol.
fn vol_or_nan(price: f64, forward: f64, strike: f64, expiry: f64) -> f64 {
    implied_vol_of(price, forward, strike, expiry).unwrap_or(f64::NAN)
}

fn tail_label(tail: TailRegime) -> &'static str {
    match tail {
        TailRegime::Interior => "interior",
        TailRegime::ClampedItm => "clamped_itm",
        TailRegime::DeepOtm => "deep_otm",
    }
}

pub fn price(args: &PriceArgs) -> Result<Table, CliError> {
    let cfg = RunConfig::from_grid(&args.grid)?;
    check_orders(&[(args.n1, "n1"), (args.n2, "n2")], MAX_PRICING_ORDER)?;
    let market = load(&args.market.market)?;
    let strikes = cfg.strike_levels(market.setup.spot_equity);
    let mc = McSpec { paths: args.paths, seed: args.seed, ..McSpec::default() };

    let mut header = vec![
        "T", "K", "quanto_price", "vanilla_price", "spread", "quanto_forward", "quanto_vol", "adhoc_vol", "tail",
    ];
    match args.oracle {
        OracleKind::Copula => header.extend(["copula_price", "copula_vol", "copula_vol_diff"]),
        OracleKind::Mc => header.extend(["mc_price", "mc_std_error", "mc_vol"]),
        OracleKind::None => {}
    }

    let blocks = per_maturity(&cfg.maturities, args.parallel, |t| {
        let ctx = build_context(&market, t, args.n1, args.n2)?;
        let (bd, bf) = ctx.discount_factors();
        let fq = ctx.quanto_forward();
        let copula = match args.oracle {
            OracleKind::Copula => Some(CopulaOracle::new(&market, t, QuadratureSpec::default())?),
            _ => None,
        };
        let mc_values = match args.oracle {
            OracleKind::Mc => Some(mc_quanto_price(&market, t, &strikes, mc)?),
            _ => None,
        };
        let mut rows = Vec::with_capacity(strikes.len());
        for (i, &k) in strikes.iter().enumerate() {
            let p = ctx.quanto_call(k)?;
            let vol = vol_or_nan(p.price / bd, fq, k, t);
            let adhoc = adhoc_quanto_price(&market, t, k)?;
            let mut row = vec![
                Cell::Num(t),
                Cell::Num(k),
                Cell::Num(p.price),
                Cell::Num(bf * p.vanilla),
                Cell::Num(bf / market.setup.spot_fx * p.spread),
                Cell::Num(fq),
                Cell::Num(vol),
                Cell::Num(vol_or_nan(adhoc / bd, fq, k, t)),
                Cell::Text(tail_label(p.tail).into()),
            ];
            if let Some(oracle) = &copula {
                let c = oracle.quanto_price(k)?.value;
                let cv = vol_or_nan(c / bd, fq, k, t);
                row.extend([Cell::Num(c), Cell::Num(cv), Cell::Num((vol - cv).abs())]);
            }
            if let Some(est) = &mc_values {
                let e = est[i];
                row.extend([Cell::Num(e.value), Cell::Num(e.std_error), Cell::Num(vol_or_nan(e.value / bd, fq, k, t))]);
            }
            rows.push(row);
        }
        Ok(rows)
    })?;
    let mut table = Table::new(header);
    blocks.into_iter().flatten().for_each(|r| table.push(r));
    Ok(table)
}

pub fn calibrate(args: &CalibrateArgs) -> Result<Table, CliError> {
    if args.maturities.len() != args.target_forward.len() {
        return Err(CliError::Usage(format!(
            "{} maturities but {} target forwards",
            args.maturities.len(),
            args.target_forward.len()
        )));
    }
    check_orders(&[(args.n1, "n1"), (args.n2, "n2")], MAX_PRICING_ORDER)?;
    let market = load(&args.market.market)?;
    let mut table = Table::new(vec!["T", "target_forward", "rho", "forward", "residual", "iterations"]);
    for (&t, &target) in args.maturities.iter().zip(&args.target_forward) {
        let ctx = build_context(&market, t, args.n1, args.n2)?;
        let fit = calibrate_rho(&ctx, target).map_err(|e| match e {
            Error::InvalidInput(_) => CliError::Core(e),
            other => CliError::Calibration(other),
        })?;
        table.push(vec![
            Cell::Num(t),
            Cell::Num(target),
            Cell::Num(fit.rho),
            Cell::Num(fit.forward),
            Cell::Num(fit.residual),
            Cell::Int(fit.iterations as u64),
        ]);
    }
    Ok(table)
}

pub fn drift_grid(args: &DriftArgs) -> Result<Table, CliError> {
    let cfg = RunConfig::from_grid(&args.grid)?;
    check_orders(&[(args.nt, "nt")], MAX_NT)?;
    if args.oracle == OracleKind::Mc {
        return Err(CliError::Usage("drift-grid supports --oracle copula or none".into()));
    }
    let market = load(&args.market.market)?;
    let spots = cfg.strike_levels(market.setup.spot_equity);
    let mut header = vec!["t", "S", "drift", "sigma_xs"];
    if args.oracle == OracleKind::Copula {
        header.extend(["copula_drift", "copula_sigma_xs"]);
    }
    let blocks = per_maturity(&cfg.maturities, args.parallel, |t| {
        let slice = fit_drift_slice(&market, t, args.nt)?;
        let oracle = match args.oracle {
            OracleKind::Copula => Some(CopulaOracle::new(&market, t, QuadratureSpec::default())?),
            _ => None,
        };
        let mut rows = Vec::with_capacity(spots.len());
        for &s in &spots {
            let drift = slice.quanto_local_drift(s)?;
            let vol = slice.conditional_fx_vol(s)?;
            let mut row = vec![Cell::Num(t), Cell::Num(s), Cell::Num(drift), Cell::Num(vol)];
            if let Some(o) = &oracle {
                let ov = o.conditional_fx_vol(s)?;
                let sigma_s = market.equity.local_vol(s, t)?;
                row.extend([Cell::Num(market.setup.rho * sigma_s * ov), Cell::Num(ov)]);
            }
            rows.push(row);
        }
        Ok(rows)
    })?;
    let mut table = Table::new(header);
    blocks.into_iter().flatten().for_each(|r| table.push(r));
    Ok(table)
}

pub fn bench(args: &BenchArgs) -> Result<Table, CliError> {
    check_orders(&[(args.n1, "n1"), (args.n2, "n2")], MAX_PRICING_ORDER)?;
    let market = match &args.market {
        Some(path) => load(path)?,
        None => skewed_market(SkewScenario::NegativeEquity, 0.7)?,
    };
    let mut table = Table::new(vec!["options", "maturities", "strikes", "total_seconds", "per_option_seconds"]);
    for row in table_rows(&market, args.n1, args.n2, args.reps)? {
        table.push(vec![
            Cell::Int(row.options() as u64),
            Cell::Int(row.maturities as u64),
            Cell::Int(row.strikes as u64),
            Cell::Num(row.total_seconds),
            Cell::Num(row.per_option_seconds()),
        ]);
    }
    Ok(table)
}

pub fn synthetic(args: &SyntheticArgs) -> Result<String, CliError> {
    let market = match args.scenario.skew() {
        Some(sc) => skewed_market(sc, args.rho)?,
        None => flat_market(default_setup(args.rho), 0.2, 0.1)?,
    };
    Ok(market.to_json())
}
