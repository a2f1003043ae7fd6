//! Numerical certificates: the profile identities, the Euler–Lagrange
//! conditions of the closed form, and positivity of the second variation.

mod convexity;
mod euler_lagrange;
mod identity;

pub use convexity::{convexity_probe, form_matrix, quadratic_form, GridSpec, ProbeReport};
pub use euler_lagrange::{verify_euler_lagrange, ELReport, EXTERIOR_POINTS};
pub use identity::{identity_lhs, identity_rhs, verify_identity, IdentityId, IdentityReport};
