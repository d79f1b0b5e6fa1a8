use crate::black;
use crate::market_surface::{Asset, MarketSetup};

/// Quanto call under flat vols: Black on the forward shifted by `e^{ρσ_Sσ_X T}`,
/// discounted domestically.
pub fn closed_form_lognormal_quanto(setup: &MarketSetup, vol_s: f64, vol_x: f64, expiry: f64, strike: f64) -> f64 {
    setup.df_domestic(expiry) * black::call(lognormal_quanto_forward(setup, vol_s, vol_x, expiry), strike, vol_s, expiry)
}

pub fn lognormal_quanto_forward(setup: &MarketSetup, vol_s: f64, vol_x: f64, expiry: f64) -> f64 {
    let fs = setup.spot_equity * (setup.carry(Asset::Equity) * expiry).exp();
    fs * (setup.rho * vol_s * vol_x * expiry).exp()
}

/// `E_F[X_T/X₀ | S_T = S]` for a bivariate lognormal: a power of `S`.
pub fn lognormal_conditional_fx(setup: &MarketSetup, vol_s: f64, vol_x: f64, expiry: f64, spot: f64) -> f64 {
    let fs = setup.spot_equity * (setup.carry(Asset::Equity) * expiry).exp();
    let (ss, sx) = (vol_s * expiry.sqrt(), vol_x * expiry.sqrt());
    let z = ((spot / fs).ln() + 0.5 * ss * ss) / ss;
    let fx_ratio = (setup.carry(Asset::Fx) * expiry).exp();
    fx_ratio * (setup.rho * sx * z - 0.5 * setup.rho * setup.rho * sx * sx).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market_surface::synthetic::default_setup;

    #[test]
    fn zero_correlation_forward_is_equity_forward() {
        let s = default_setup(0.0);
        let fs = s.spot_equity * (s.carry(Asset::Equity) * 3.0).exp();
        assert!((lognormal_quanto_forward(&s, 0.2, 0.1, 3.0) - fs).abs() < 1e-12);
    }

    #[test]
    fn conditional_fx_integrates_to_fx_forward() {
        let s = default_setup(0.6);
        let t = 2.0;
        let fs = s.spot_equity * (s.carry(Asset::Equity) * t).exp();
        let ss = 0.2 * t.sqrt();
        let (x, w) = crate::oracles::quadrature::gauss_legendre(80);
        let mut acc = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            let z = 8.0 * xi;
            let spot = fs * (ss * z - 0.5 * ss * ss).exp();
            acc += 8.0 * wi * crate::normal::pdf(z) * lognormal_conditional_fx(&s, 0.2, 0.1, t, spot);
        }
        assert!((acc - (s.carry(Asset::Fx) * t).exp()).abs() < 1e-12);
    }
}
