use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal;

/// Coefficients of a polynomial in a standard normal variable, lowest power first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolyCoeffs(Vec<f64>);

impl PolyCoeffs {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("polynomial needs at least one coefficient".into()));
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite polynomial coefficient {bad}")));
        }
        Ok(Self(coeffs))
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    /// Horner evaluation.
    #[inline]
    pub fn eval(&self, z: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    /// First derivative at `z`.
    pub fn eval_derivative(&self, z: f64) -> f64 {
        self.0
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (n, &c)| acc * z + n as f64 * c)
    }

    /// `E[p(Z)]` for standard normal `Z`.
    pub fn normal_mean(&self) -> f64 {
        self.0
            .iter()
            .enumerate()
            .map(|(n, &c)| c * normal::raw_moment(n))
            .sum()
    }

    /// Copy zero-padded (or truncated) to `len` coefficients.
    pub fn padded(&self, len: usize) -> Vec<f64> {
        let mut v = self.0.clone();
        v.resize(len, 0.0);
        v
    }

    /// Smallest derivative on an even grid of `samples` points over `[lo, hi]`; a
    /// negative value means the map is not monotone there.
    pub fn min_slope(&self, lo: f64, hi: f64, samples: usize) -> f64 {
        let samples = samples.max(2);
        (0..samples)
            .map(|i| self.eval_derivative(lo + (hi - lo) * i as f64 / (samples - 1) as f64))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Horner evaluation of `p` at `z`.
#[inline]
pub fn eval_poly(p: &PolyCoeffs, z: f64) -> f64 {
    p.eval(z)
}

/// Coefficients `q_i(n; ρ)` with `E[Z₁ⁿ | Z₂ = z] = Σᵢ q_i(n; ρ) zⁱ` for standard
/// normals with correlation `ρ`, for every `n ≤ n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalMomentTable {
    rho: f64,
    rows: Vec<Vec<f64>>,
}

/// Largest power supported by the conditional-moment table.
pub const MAX_MOMENT_POWER: usize = 30;

impl ConditionalMomentTable {
    pub fn new(n_max: usize, rho: f64) -> Result<Self> {
        if n_max > MAX_MOMENT_POWER {
            return Err(Error::InvalidInput(format!(
                "conditional moment power {n_max} exceeds {MAX_MOMENT_POWER}"
            )));
        }
        if !(rho.abs() <= 1.0) {
            return Err(Error::InvalidInput(format!("rho must lie in [-1, 1], got {rho}")));
        }
        let resid = 1.0 - rho * rho;
        let rows = (0..=n_max)
            .map(|n| {
                let mut row = vec![0.0; n + 1];
                // Z₁ | z ~ N(ρz, 1 − ρ²): expand (ρz + √(1−ρ²) U)ⁿ and use E[U^{2j}] = (2j−1)!!
                for j in 0..=n / 2 {
                    row[n - 2 * j] = binomial(n, 2 * j)
                        * normal::double_factorial(2 * j as i64 - 1)
                        * resid.powi(j as i32)
                        * rho.powi((n - 2 * j) as i32);
                }
                row
            })
            .collect();
        Ok(Self { rho, rows })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// `q_0(n; ρ) … q_n(n; ρ)`.
    pub fn row(&self, n: usize) -> &[f64] {
        &self.rows[n]
    }
}

/// Exact in integers for `n ≤ 30`.
fn binomial(n: usize, k: usize) -> f64 {
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc as f64
}

/// `q_0(n; ρ) … q_n(n; ρ)` for a single power.
pub fn conditional_moment_coeffs(n: usize, rho: f64) -> Result<Vec<f64>> {
    Ok(ConditionalMomentTable::new(n, rho)?.rows.pop().expect("table has row n"))
}

/// Coefficients of `E[p(Z₁) | Z₂ = z]` as a polynomial in `z`:
/// `b_n = Σ_{j ≥ n} a_j q_n(j; ρ)`.
pub fn condition_coeffs(a: &PolyCoeffs, rho: f64) -> Result<PolyCoeffs> {
    let table = ConditionalMomentTable::new(a.degree(), rho)?;
    Ok(condition_with_table(a, &table))
}

pub(crate) fn condition_with_table(a: &PolyCoeffs, table: &ConditionalMomentTable) -> PolyCoeffs {
    let len = a.len();
    let mut b = vec![0.0; len];
    for (j, &aj) in a.coeffs().iter().enumerate() {
        for (n, &q) in table.row(j).iter().enumerate() {
            b[n] += aj * q;
        }
    }
    PolyCoeffs(b)
}

/// Coefficients of the product polynomial: `c_n = Σ_k a_k b_{n−k}`.
pub fn convolve(a: &PolyCoeffs, b: &PolyCoeffs) -> PolyCoeffs {
    let mut c = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.coeffs().iter().enumerate() {
        for (j, &bj) in b.coeffs().iter().enumerate() {
            c[i + j] += ai * bj;
        }
    }
    PolyCoeffs(c)
}
