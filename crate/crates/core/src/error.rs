use thiserror::Error;

/// Errors raised by surface construction, collocation and pricing.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("market data schema error at line {line}, column {column}: {message}")]
    Schema {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("strike {strike} outside evaluable domain [{lo}, {hi}] at T={expiry}")]
    OutOfDomain {
        strike: f64,
        lo: f64,
        hi: f64,
        expiry: f64,
    },

    #[error("arbitrage violation at K={strike}, t={time}: {reason}")]
    Arbitrage {
        strike: f64,
        time: f64,
        reason: String,
    },

    #[error(
        "collocation node z={node} saturates the {asset} quantile at T={expiry}; \
         widen [K_lo, K_hi]"
    )]
    TailCoverage {
        asset: &'static str,
        node: f64,
        expiry: f64,
    },

    #[error("truncation point kappa={0} beyond reliable survival range (|kappa| <= 12)")]
    TailUnderflow(f64),

    #[error("target quanto forward {target} unattainable; attainable interval [{lo}, {hi}]")]
    UnattainableForward { target: f64, lo: f64, hi: f64 },

    #[error("quanto forward is not monotone in correlation on the pre-scan grid")]
    NonMonotoneForward,

    #[error("price {price} outside Black bounds [{lower}, {upper}]")]
    PriceBounds { price: f64, lower: f64, upper: f64 },

    #[error("root solve did not converge: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(value: f64, name: &str) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be finite, got {value}")))
    }
}

pub(crate) fn ensure_positive(value: f64, name: &str) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive, got {value}")))
    }
}
