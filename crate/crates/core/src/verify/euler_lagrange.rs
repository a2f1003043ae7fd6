//! Optimality of the closed form: its potential must equal `η` on the
//! support and stay above `η` off it.

use serde::Serialize;

use crate::closedform::{build_solution, ClosedFormSolution};
use crate::kernel::{Kernel, Regime};
use crate::reduce::par_rows;
use crate::{Error, Result};

pub const EXTERIOR_POINTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ELReport {
    pub alpha: f64,
    pub regime: Regime,
    pub eta_ref: f64,
    /// True when `eta_ref` is the quadrature potential at the centre.
    pub eta_empirical: bool,
    pub interior_points: usize,
    pub exterior_points: usize,
    pub max_interior_deviation: f64,
    pub min_exterior_slack: f64,
    pub exterior_span: f64,
    /// Radius at which the potential of the rescaled profile is level
    /// between the centre and half the radius.
    pub recovered_radius: f64,
    pub radius: f64,
    pub tol: f64,
    pub pass: bool,
}

impl ELReport {
    /// Largest violation of either condition; zero when both hold exactly.
    pub fn residual(&self) -> f64 {
        self.max_interior_deviation.max(-self.min_exterior_slack).max(0.0)
    }
}

fn chebyshev(center: f64, radius: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|j| center + radius * ((2 * j - 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos())
        .collect()
}

/// `φ(a + ρ/2) − φ(a)` for the profile stretched to radius `ρ`; positive
/// when `ρ` is too large.
fn level_defect(s: &ClosedFormSolution, rho: f64) -> Result<f64> {
    let trial = ClosedFormSolution { radius: rho, ..*s };
    Ok(trial.potential_by_quadrature(s.center + 0.5 * rho)? - trial.potential_by_quadrature(s.center)?)
}

/// Bisection for the radius where the trial potential is level on the support.
fn recover_radius(s: &ClosedFormSolution) -> Result<f64> {
    let mut lo = 0.25 * s.radius;
    let mut hi = 4.0 * s.radius;
    let f_lo = level_defect(s, lo)?;
    let f_hi = level_defect(s, hi)?;
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::domain("radius bracket does not change sign"));
    }
    let rising = f_hi > 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if (level_defect(s, mid)? > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-12 * s.radius {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Checks `φ = η` at `interior_pts` Chebyshev points of the support and
/// `φ ≥ η` on [`EXTERIOR_POINTS`] equispaced points on each side, out to
/// `exterior_span` beyond the edge.
pub fn verify_euler_lagrange(k: &Kernel, interior_pts: usize, exterior_span: f64, tol: f64) -> Result<ELReport> {
    if interior_pts == 0 {
        return Err(Error::domain("need at least one interior point"));
    }
    if !(exterior_span > 0.0) || !(tol > 0.0) {
        return Err(Error::domain("exterior span and tolerance must be positive"));
    }
    let s = build_solution(*k, 0.0)?;
    let (eta, empirical) = s.eta_reference()?;
    let r = s.radius;

    let inside = chebyshev(s.center, r, interior_pts);
    let step = exterior_span / (EXTERIOR_POINTS - 1) as f64;
    let outside: Vec<f64> = (0..EXTERIOR_POINTS)
        .flat_map(|i| {
            let d = r + step * i as f64;
            [s.center + d, s.center - d]
        })
        .collect();

    let dev = par_rows(inside.len(), |i| s.potential_by_quadrature(inside[i]).map(|phi| (phi - eta).abs()));
    let slack = par_rows(outside.len(), |i| s.potential_by_quadrature(outside[i]).map(|phi| phi - eta));
    let max_interior_deviation = dev.into_iter().try_fold(0.0f64, |m, d| d.map(|d| m.max(d)))?;
    let min_exterior_slack = slack.into_iter().try_fold(f64::INFINITY, |m, d| d.map(|d| m.min(d)))?;
    let recovered_radius = recover_radius(&s)?;

    Ok(ELReport {
        alpha: k.alpha(),
        regime: k.regime(),
        eta_ref: eta,
        eta_empirical: empirical,
        interior_points: interior_pts,
        exterior_points: 2 * EXTERIOR_POINTS,
        max_interior_deviation,
        min_exterior_slack,
        exterior_span,
        recovered_radius,
        radius: r,
        tol,
        pass: max_interior_deviation <= tol && min_exterior_slack >= -tol,
    })
}
