//! Stochastic collocation: polynomial maps from a standard normal onto a marginal,
//! interpolated at Gauss-Hermite nodes, and the conditional-moment algebra that
//! combines two such maps under a Gaussian copula.

mod poly;

use nalgebra::{DMatrix, DVector, Dyn, SymmetricEigen, LU};

use crate::error::{Error, Result};
use crate::market_surface::MarginalDistribution;

pub use poly::{
    condition_coeffs, conditional_moment_coeffs, convolve, eval_poly, ConditionalMomentTable,
    PolyCoeffs, MAX_MOMENT_POWER,
};
pub(crate) use poly::condition_with_table;

pub const MIN_ORDER: usize = 2;
pub const MAX_ORDER: usize = 16;
/// Default collocation order for both marginals.
pub const DEFAULT_ORDER: usize = 7;

/// Gauss-Hermite collocation nodes (zeros of the probabilists' `He_N`) with the
/// factored Vandermonde matrix `V[i][j] = x_iʲ`.
#[derive(Debug, Clone)]
pub struct CollocationBasis {
    nodes: Vec<f64>,
    vandermonde: DMatrix<f64>,
    lu: LU<f64, Dyn, Dyn>,
}

/// Zeros of `He_N` as eigenvalues of its Jacobi matrix (zero diagonal, off-diagonal
/// `√k`), symmetrized about the origin.
pub fn hermite_nodes(order: usize) -> Result<CollocationBasis> {
    if !(MIN_ORDER..=MAX_ORDER).contains(&order) {
        return Err(Error::InvalidInput(format!(
            "collocation order {order} outside [{MIN_ORDER}, {MAX_ORDER}]"
        )));
    }
    let jacobi = DMatrix::from_fn(order, order, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64).sqrt()
        } else {
            0.0
        }
    });
    let mut raw: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    raw.sort_by(|a, b| a.total_cmp(b));
    let nodes: Vec<f64> = (0..order)
        .map(|i| {
            let x = 0.5 * (raw[i] - raw[order - 1 - i]);
            if 2 * i + 1 == order {
                0.0
            } else {
                x
            }
        })
        .collect();
    let vandermonde = DMatrix::from_fn(order, order, |i, j| nodes[i].powi(j as i32));
    let lu = vandermonde.clone().lu();
    if !lu.is_invertible() {
        return Err(Error::NoConvergence(format!("singular Vandermonde matrix at order {order}")));
    }
    Ok(CollocationBasis {
        nodes,
        vandermonde,
        lu,
    })
}

impl CollocationBasis {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn vandermonde(&self) -> &DMatrix<f64> {
        &self.vandermonde
    }

    /// Interpolating polynomial through `(x_i, values[i])`.
    pub fn solve(&self, values: &[f64]) -> Result<PolyCoeffs> {
        if values.len() != self.order() {
            return Err(Error::InvalidInput(format!(
                "expected {} collocation values, got {}",
                self.order(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite collocation value {bad}")));
        }
        let rhs = DVector::from_column_slice(values);
        let mut a = self
            .lu
            .solve(&rhs)
            .ok_or_else(|| Error::NoConvergence("Vandermonde solve failed".into()))?;
        // one step of iterative refinement
        let resid = &rhs - &self.vandermonde * &a;
        if let Some(delta) = self.lu.solve(&resid) {
            a += delta;
        }
        PolyCoeffs::new(a.iter().copied().collect())
    }
}

/// Solves `V a = values` on the basis nodes.
pub fn solve_vandermonde(basis: &CollocationBasis, values: &[f64]) -> Result<PolyCoeffs> {
    basis.solve(values)
}

/// Marginal quantiles `F⁻¹(Φ(x_i))` at the basis nodes. Fails with a tail-coverage
/// error if a node falls beyond the mass captured by the strike bounds, and checks
/// that the values increase strictly.
pub fn node_quantiles(dist: &MarginalDistribution, basis: &CollocationBasis) -> Result<Vec<f64>> {
    let mut values = Vec::with_capacity(basis.order());
    for &x in basis.nodes() {
        let q = dist.quantile_at_score(x)?;
        if q.saturated.is_some() {
            return Err(Error::TailCoverage {
                asset: dist.surface().asset().label(),
                node: x,
                expiry: dist.expiry(),
            });
        }
        if let Some(&prev) = values.last() {
            if !(q.strike > prev) {
                return Err(Error::Arbitrage {
                    strike: q.strike,
                    time: dist.expiry(),
                    reason: "node quantiles not strictly increasing".into(),
                });
            }
        }
        values.push(q.strike);
    }
    Ok(values)
}

/// Collocation polynomial `ĝ(z) ≈ F⁻¹(Φ(z))` for a marginal.
pub fn fit_marginal(dist: &MarginalDistribution, basis: &CollocationBasis) -> Result<PolyCoeffs> {
    basis.solve(&node_quantiles(dist, basis)?)
}
