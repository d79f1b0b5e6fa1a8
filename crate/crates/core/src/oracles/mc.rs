use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::local_drift::fit_drift_slice;
use crate::market_surface::{Asset, MarketData, Slice};

const CHUNK_PATHS: usize = 1 << 12;
const DRIFT_GRID: usize = 1001;

/// Discretization scheme of the Monte Carlo engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Euler on log-prices with coefficients frozen at the step's midpoint time.
    LogEuler,
}

/// Monte Carlo configuration. Paths are generated in chunks of 4096, each with its
/// own ChaCha stream derived from `seed`, so results do not depend on thread count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSpec {
    pub paths: usize,
    pub steps_per_year: usize,
    pub seed: u64,
    pub scheme: Scheme,
}

impl Default for McSpec {
    fn default() -> Self {
        Self {
            paths: 1 << 20,
            steps_per_year: 100,
            seed: 20_170_901,
            scheme: Scheme::LogEuler,
        }
    }
}

impl McSpec {
    fn validate(&self) -> Result<()> {
        if self.paths < 1 << 10 || self.steps_per_year == 0 {
            return Err(Error::InvalidInput(format!(
                "Monte Carlo needs at least 1024 paths and one step per year, got {self:?}"
            )));
        }
        Ok(())
    }

    fn time_grid(&self, expiry: f64) -> Vec<f64> {
        let n = ((expiry * self.steps_per_year as f64).ceil() as usize).max(1);
        (0..=n).map(|i| expiry * i as f64 / n as f64).collect()
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub paths: usize,
}

/// Runs `paths` in fixed chunks, each with its own stream, and accumulates discounted
/// payoff sums per strike in chunk order.
fn run_chunks<F>(spec: &McSpec, strikes: &[f64], discount: f64, simulate: F) -> Result<Vec<McEstimate>>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    let chunks = spec.paths.div_ceil(CHUNK_PATHS);
    let partial: Vec<Result<Vec<(f64, f64)>>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(chunk as u64);
            let n = CHUNK_PATHS.min(spec.paths - chunk * CHUNK_PATHS);
            let mut acc = vec![(0.0, 0.0); strikes.len()];
            for _ in 0..n {
                let s = simulate(&mut rng)?;
                for (a, &k) in acc.iter_mut().zip(strikes) {
                    let p = (s - k).max(0.0);
                    a.0 += p;
                    a.1 += p * p;
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![(0.0, 0.0); strikes.len()];
    for part in partial {
        for (t, p) in total.iter_mut().zip(part?) {
            t.0 += p.0;
            t.1 += p.1;
        }
    }
    let n = spec.paths as f64;
    Ok(total
        .into_iter()
        .map(|(sum, sq)| {
            let mean = sum / n;
            let var = (sq / n - mean * mean).max(0.0) * n / (n - 1.0);
            McEstimate {
                value: discount * mean,
                std_error: discount * (var / n).sqrt(),
                paths: spec.paths,
            }
        })
        .collect())
}

struct Step {
    dt: f64,
    sqrt_dt: f64,
    equity: Slice,
    fx: Slice,
    ln_fwd_equity: f64,
    ln_fwd_fx: f64,
}

/// Quanto calls by a two-factor local-vol simulation under the domestic measure:
/// `d ln S = (r_F − δ + ρσ_Sσ_X − σ_S²/2) dt + σ_S dW_S`,
/// `d ln X = (r_F − r_D + σ_X²/2) dt + σ_X dW_X`, with Dupire local vols of both
/// surfaces. Returns domestic discounted prices for every strike from one path set.
pub fn mc_quanto_price(market: &MarketData, expiry: f64, strikes: &[f64], spec: McSpec) -> Result<Vec<McEstimate>> {
    spec.validate()?;
    let setup = market.setup;
    let (eq, fx) = (&market.equity, &market.fx);
    let times = spec.time_grid(expiry);
    let steps = times
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let (e, x) = (eq.slice(mid)?, fx.slice(mid)?);
            Ok(Step {
                dt: w[1] - w[0],
                sqrt_dt: (w[1] - w[0]).sqrt(),
                ln_fwd_equity: e.forward.ln(),
                ln_fwd_fx: x.forward.ln(),
                equity: e,
                fx: x,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rho = setup.rho;
    let rho_c = (1.0 - rho * rho).max(0.0).sqrt();
    let mu_s = setup.carry(Asset::Equity);
    let mu_x = setup.carry(Asset::Fx);
    let (s0, x0) = (setup.spot_equity.ln(), setup.spot_fx.ln());
    run_chunks(&spec, strikes, setup.df_domestic(expiry), |rng| {
        let (mut ls, mut lx) = (s0, x0);
        for st in &steps {
            let e1: f64 = StandardNormal.sample(rng);
            let e2: f64 = StandardNormal.sample(rng);
            let vs = eq.local_vol_at(&st.equity, ls - st.ln_fwd_equity)?;
            let vx = fx.local_vol_at(&st.fx, lx - st.ln_fwd_fx)?;
            ls += (mu_s + rho * vs * vx - 0.5 * vs * vs) * st.dt + vs * st.sqrt_dt * (rho * e1 + rho_c * e2);
            lx += (mu_x + 0.5 * vx * vx) * st.dt + vx * st.sqrt_dt * e1;
        }
        Ok(ls.exp())
    })
}

struct DriftTable {
    dt: f64,
    sqrt_dt: f64,
    x0: f64,
    inv_h: f64,
    /// log-drift `r_F − δ + ρσ_Sσ_XS − σ_S²/2`
    drift: Vec<f64>,
    vol: Vec<f64>,
}

impl DriftTable {
    #[inline]
    fn lookup(&self, x: f64) -> (f64, f64) {
        let u = ((x - self.x0) * self.inv_h).clamp(0.0, (self.drift.len() - 1) as f64);
        let i = (u as usize).min(self.drift.len() - 2);
        let f = u - i as f64;
        (
            self.drift[i] + f * (self.drift[i + 1] - self.drift[i]),
            self.vol[i] + f * (self.vol[i + 1] - self.vol[i]),
        )
    }
}

/// Quanto calls by a one-factor equity local-vol simulation whose drift is the
/// projected quanto drift `ρ σ_S(S,t) σ_XS(S,t)` (order `drift_order` slices at each
/// step's midpoint, tabulated on a fine log-spot grid and interpolated linearly).
pub fn gyongy_mc_price(
    market: &MarketData,
    expiry: f64,
    strikes: &[f64],
    spec: McSpec,
    drift_order: usize,
) -> Result<Vec<McEstimate>> {
    spec.validate()?;
    let setup = market.setup;
    let eq = &market.equity;
    let mu_s = setup.carry(Asset::Equity);
    let times = spec.time_grid(expiry);
    let tables = times
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let slice = fit_drift_slice(market, mid, drift_order)?;
            let dist = slice.equity_marginal();
            let ln_f = dist.forward().ln();
            let half = 10.0 * eq.variance(dist.slice(), 0.0).w.sqrt();
            let lo = ln_f + dist.slice().y_lo.max(-half);
            let hi = ln_f + dist.slice().y_hi.min(half);
            let h = (hi - lo) / (DRIFT_GRID - 1) as f64;
            let mut drift = Vec::with_capacity(DRIFT_GRID);
            let mut vol = Vec::with_capacity(DRIFT_GRID);
            for i in 0..DRIFT_GRID {
                let s = (lo + h * i as f64).exp().clamp(dist.strike_lo(), dist.strike_hi());
                let v = eq.local_vol_on(dist.slice(), s)?;
                drift.push(mu_s + slice.quanto_local_drift(s)? - 0.5 * v * v);
                vol.push(v);
            }
            Ok(DriftTable {
                dt: w[1] - w[0],
                sqrt_dt: (w[1] - w[0]).sqrt(),
                x0: lo,
                inv_h: 1.0 / h,
                drift,
                vol,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let s0 = setup.spot_equity.ln();
    run_chunks(&spec, strikes, setup.df_domestic(expiry), |rng| {
        let mut ls = s0;
        for t in &tables {
            let e: f64 = StandardNormal.sample(rng);
            let (mu, v) = t.lookup(ls);
            ls += mu * t.dt + v * t.sqrt_dt * e;
        }
        Ok(ls.exp())
    })
}
