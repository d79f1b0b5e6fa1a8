//! Batch-amortization timing harness: wall-clock cost of building per-maturity
//! contexts and pricing strike strips, reported as medians over repetitions.

use std::hint::black_box;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::market_surface::MarketData;
use crate::quanto_pricer::build_context;

/// Minimum timed repetitions per row (after one warm-up run).
pub const MIN_REPETITIONS: usize = 10;

/// Median wall-clock time for pricing `maturities × strikes` options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub maturities: usize,
    pub strikes: usize,
    pub total_seconds: f64,
}

impl BenchRow {
    pub fn options(&self) -> usize {
        self.maturities * self.strikes
    }

    pub fn per_option_seconds(&self) -> f64 {
        self.total_seconds / self.options() as f64
    }
}

/// `count` points evenly spaced on `[lo, hi]` (the midpoint when `count == 1`).
pub fn even_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
    }
}

fn price_batch(market: &MarketData, maturities: &[f64], strikes: &[f64], n1: usize, n2: usize) -> Result<f64> {
    let mut sum = 0.0;
    for &t in maturities {
        let ctx = build_context(market, t, n1, n2)?;
        for &k in strikes {
            sum += ctx.quanto_call(k)?.price;
        }
    }
    Ok(sum)
}

/// Times the full recipe (context build per maturity, then every strike) `repetitions`
/// times after one warm-up and returns the median.
pub fn bench_row(
    market: &MarketData,
    maturities: &[f64],
    strikes: &[f64],
    n1: usize,
    n2: usize,
    repetitions: usize,
) -> Result<BenchRow> {
    if maturities.is_empty() || strikes.is_empty() {
        return Err(Error::InvalidInput("benchmark needs at least one maturity and one strike".into()));
    }
    let reps = repetitions.max(MIN_REPETITIONS);
    black_box(price_batch(market, maturities, strikes, n1, n2)?);
    let mut samples = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        black_box(price_batch(market, black_box(maturities), black_box(strikes), n1, n2)?);
        samples.push(start.elapsed().as_secs_f64());
    }
    samples.sort_by(f64::total_cmp);
    let mid = samples.len() / 2;
    let median = if samples.len() % 2 == 0 { 0.5 * (samples[mid - 1] + samples[mid]) } else { samples[mid] };
    Ok(BenchRow { maturities: maturities.len(), strikes: strikes.len(), total_seconds: median })
}

/// The four standard row shapes `(maturities, strikes)`: 1×1, 1×100, 10×10, 10×100.
pub const TABLE_SHAPES: [(usize, usize); 4] = [(1, 1), (1, 100), (10, 10), (10, 100)];

/// Runs every row of [`TABLE_SHAPES`] with maturities evenly spread over `[0.5, 5]`
/// and strikes over `[70%, 130%]` of spot (a single maturity sits at 1Y, a single
/// strike at the money).
pub fn table_rows(market: &MarketData, n1: usize, n2: usize, repetitions: usize) -> Result<Vec<BenchRow>> {
    let spot = market.setup.spot_equity;
    TABLE_SHAPES
        .iter()
        .map(|&(m, k)| {
            let maturities = if m == 1 { vec![1.0] } else { even_grid(0.5, 5.0, m) };
            let strikes = if k == 1 { vec![spot] } else { even_grid(0.7 * spot, 1.3 * spot, k) };
            bench_row(market, &maturities, &strikes, n1, n2, repetitions)
        })
        .collect()
}
