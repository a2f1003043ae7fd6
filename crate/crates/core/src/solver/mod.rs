//! Numerical minimizers: particle gradient descent and Frank–Wolfe on a
//! fixed grid.
//!
//! Both return the minimizing measure together with a [`SolveReport`]
//! comparing it to the closed form.

mod frank_wolfe;
mod particles;

use serde::Serialize;

pub use frank_wolfe::{solve_grid_fw, Discretization, FwOpts, FwVariant};
pub use particles::{solve_particles, solve_particles_from, ParticleOpts};

use crate::closedform::{build_solution, ClosedFormSolution};
use crate::kernel::{Kernel, Regime};
use crate::measure::{energy_quadrature, wasserstein1, DiagonalRule, GridMeasure, Measure};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Particles,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Gradient norm or Frank–Wolfe gap below tolerance.
    Converged,
    MaxIterations,
    /// No step length passed the sufficient-decrease test.
    LineSearchStalled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub method: Method,
    pub alpha: f64,
    pub regime: Regime,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub reference_energy: f64,
    /// True when the reference is the quadrature energy (log kernel).
    pub reference_empirical: bool,
    /// `final − reference`.
    pub energy_gap: f64,
    pub relative_gap: f64,
    pub iterations: usize,
    pub termination: Termination,
    /// Max-norm gradient (particles) or Frank–Wolfe gap (grid).
    pub residual: f64,
    /// Distance to the closed form centred at the output's centre of mass.
    pub wasserstein1: f64,
    pub diagonal: DiagonalRule,
}

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Core(#[from] Error),
    /// The iteration budget ran out before the gap tolerance was met; the
    /// best iterate and its report are attached.
    #[error("iteration budget exhausted with Frank-Wolfe gap {:e}", .0.1.residual)]
    BudgetExhausted(Box<(GridMeasure, SolveReport)>),
}

/// Reference energy of the closed form, falling back to quadrature.
pub(crate) fn reference_energy(s: &ClosedFormSolution) -> crate::Result<(f64, bool)> {
    match s.energy {
        Some(e) => Ok((e, false)),
        None => Ok((energy_quadrature(s)?, true)),
    }
}

pub(crate) struct Comparison {
    pub reference: f64,
    pub empirical: bool,
    pub w1: f64,
}

pub(crate) fn compare(k: &Kernel, mu: &Measure) -> crate::Result<Comparison> {
    let s = build_solution(*k, mu.center_of_mass())?;
    let (reference, empirical) = reference_energy(&s)?;
    let w1 = wasserstein1(mu, &Measure::ClosedForm(s))?;
    Ok(Comparison { reference, empirical, w1 })
}
