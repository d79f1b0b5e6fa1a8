//! Quanto option pricing under equity and FX smiles by stochastic collocation.
//!
//! Each marginal is mapped onto a standard normal through a polynomial fitted at
//! Gauss-Hermite nodes; the two normals are joined by a Gaussian copula. Conditional
//! normal moments then give the quanto-vanilla spread in closed form, and the same
//! machinery yields the Markovian-projected quanto drift for local-vol engines.

pub mod black;
pub mod collocation;
pub mod error;
pub mod local_drift;
pub mod market_surface;
pub mod normal;
pub mod oracles;
pub mod quanto_pricer;
pub mod timing;

pub use error::{Error, Result};
