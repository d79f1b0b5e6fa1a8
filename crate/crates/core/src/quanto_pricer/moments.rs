use crate::error::{Error, Result};
use crate::normal;

/// Largest `|κ|` for which the survival `1 − Φ(κ)` and the hazard ratio are trusted.
pub const MAX_KAPPA: f64 = 12.0;
/// Largest number of moments (`m_0 … m_30`).
pub const MAX_MOMENTS: usize = 31;

/// Raw moments of a standard normal truncated from below, `m_i = E[Zⁱ | Z > κ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedMoments {
    kappa: f64,
    survival: f64,
    moments: Vec<f64>,
}

impl TruncatedMoments {
    /// `m_0 … m_{count−1}` by the recursion `m_i = (i−1) m_{i−2} + κ^{i−1} φ(κ)/(1−Φ(κ))`,
    /// with a single evaluation of `φ` and `1 − Φ`.
    pub fn new(kappa: f64, count: usize) -> Result<Self> {
        if !kappa.is_finite() || kappa.abs() > MAX_KAPPA {
            return Err(Error::TailUnderflow(kappa));
        }
        if count == 0 || count > MAX_MOMENTS {
            return Err(Error::InvalidInput(format!(
                "moment count {count} outside [1, {MAX_MOMENTS}]"
            )));
        }
        let survival = normal::survival(kappa);
        let hazard = normal::pdf(kappa) / survival;
        let mut moments = Vec::with_capacity(count);
        moments.push(1.0);
        if count > 1 {
            moments.push(hazard);
        }
        let mut kappa_pow = 1.0;
        for i in 2..count {
            kappa_pow *= kappa;
            moments.push((i - 1) as f64 * moments[i - 2] + kappa_pow * hazard);
        }
        Ok(Self {
            kappa,
            survival,
            moments,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `1 − Φ(κ)`.
    pub fn survival(&self) -> f64 {
        self.survival
    }

    pub fn moments(&self) -> &[f64] {
        &self.moments
    }

    /// `φ(κ)/(1 − Φ(κ))`, equal to `m_1`.
    pub fn hazard(&self) -> f64 {
        self.moments.get(1).copied().unwrap_or_else(|| normal::pdf(self.kappa) / self.survival)
    }
}

pub fn truncated_moments(kappa: f64, count: usize) -> Result<TruncatedMoments> {
    TruncatedMoments::new(kappa, count)
}
