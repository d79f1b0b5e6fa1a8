//! Slow reference implementations: Gaussian-copula quadrature on exact quantile maps,
//! local-vol Monte Carlo (two-factor and projected one-factor), closed-form
//! lognormal quanto values, and the quadrature rules behind them.

mod copula;
mod lognormal;
mod mc;
pub mod quadrature;

pub use copula::{
    copula_quanto_forward, copula_quanto_price, exact_conditional_fx, CopulaOracle, OracleEstimate,
    QuadratureSpec,
};
pub use lognormal::{closed_form_lognormal_quanto, lognormal_conditional_fx, lognormal_quanto_forward};
pub use mc::{gyongy_mc_price, mc_quanto_price, McEstimate, McSpec, Scheme};

/// `E[Zⁱ | Z > κ]` by adaptive Gauss-Kronrod quadrature of `zⁱ φ(z)` on `[κ, κ + 40]`.
pub fn truncated_moment_quadrature(kappa: f64, power: i32) -> f64 {
    let num = quadrature::adaptive_kronrod(|z| z.powi(power) * crate::normal::pdf(z), kappa, kappa + 40.0, 1e-15);
    let den = quadrature::adaptive_kronrod(crate::normal::pdf, kappa, kappa + 40.0, 1e-17);
    num / den
}
