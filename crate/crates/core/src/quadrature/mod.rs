//! Numerical integration.
//!
//! * [`gauss_jacobi`] builds rules for `∫ f(y) (1 − y)^a (1 + y)^b dy` by the
//!   Golub–Welsch eigenvalue method; the symmetric case `a = b = −(α−1)/2`
//!   matches the minimizer's density profile exactly.
//! * [`integrate_adaptive`] is a globally adaptive Gauss–Kronrod (7/15)
//!   integrator. Endpoint singularities are declared through a [`Hint`]
//!   and removed by a power change of variables before bisection.

mod adaptive;
mod jacobi;
mod tridiag;

pub use adaptive::{integrate_adaptive, integrate_with_distances, Abscissa, Endpoint, Estimate, Hint};
pub use jacobi::{gauss_jacobi, gauss_jacobi_general, JacobiRule, DEFAULT_NODES};
pub use tridiag::symmetric_tridiagonal_eigen;
