//! Minimizers of one-dimensional attractive–repulsive interaction energies.
//!
//! For a probability measure `μ` on the line the energy is
//! `½ ∬ K(|x − y|) dμ(x) dμ(y)` with one of two power-law kernels:
//!
//! | Regime | Range        | Kernel `K(r)`               |
//! |--------|--------------|-----------------------------|
//! | A      | `2 < α < 3`  | `r^α / α − r² / 2`           |
//! | B      | `−1 < α < 2` | `r² / 2 − r^α / α` (`ln r` at `α = 0`) |
//!
//! In both regimes the minimizer is unique up to translation and has the
//! density `C⁻¹ R^{α−2} (R² − (x−a)²)^{−(α−1)/2}` on `|x − a| < R`.
//! [`closedform`] evaluates that solution, [`solver`] recovers it
//! numerically with two independent methods, and [`verify`] certifies the
//! integral identities and Euler–Lagrange conditions behind it.

// `!(x > 0.0)` guards reject NaN on purpose; rule tables keep full digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod closedform;
mod error;
pub mod io;
pub mod kernel;
pub mod measure;
pub mod quadrature;
pub mod reduce;
pub mod rng;
pub mod solver;
pub mod specfun;
pub mod verify;

pub use closedform::{build_solution, ClosedFormSolution, Constants};
pub use error::{Error, Result};
pub use kernel::{Kernel, Regime};
pub use measure::{DiscreteMeasure, GridMeasure, Measure};
