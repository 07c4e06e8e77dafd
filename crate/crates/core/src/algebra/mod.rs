//! Exact arithmetic substrate: Gaussian rationals, polynomials, truncated
//! series, homogeneous forms and linear algebra.

pub mod bivariate;
pub mod dense2;
pub mod form;
pub mod linalg;
mod modgcd;
pub(crate) mod parse;
pub mod poly;
pub mod ring;
pub mod scalar;
pub mod series;

pub use bivariate::{implicit_series_solve, BivariateSeries, Path};
pub use form::{monomials, HomogeneousForm};
pub use linalg::{linear_solve_exact, LinearSolution, Matrix};
pub use poly::{Poly, RatFn};
pub use scalar::Scalar;
pub use series::{TruncatedSeries, Var};
