//! Random probes of the second variation of the energy.
//!
//! Regime A: `α⁻¹ ∬ |x−y|^α dν dν` on signed `ν` with zero mass and zero
//! first moment. Regime B: `−α⁻¹ ∬ |x−y|^α dν dν` (`−∬ ln|x−y|` at `α = 0`)
//! on zero-mass `ν`. Both must be strictly positive.
//!
//! When the power is singular at the origin (`α ≤ 0`) the matrix entries
//! are averages over grid cells instead of point values.

use serde::Serialize;

use crate::kernel::{Kernel, Regime};
use crate::measure::GridMeasure;
use crate::reduce::{pairwise_sum, par_row_sum};
use crate::rng::Rng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub alpha: f64,
    pub regime: Regime,
    pub trials: usize,
    /// Draws that vanished after projection.
    pub skipped: usize,
    pub min_value: f64,
    pub cell_averaged: bool,
    pub all_positive: bool,
}

/// Matrix of the regime's form on the grid, row-major.
pub fn form_matrix(k: &Kernel, grid: GridSpec) -> Result<(Vec<f64>, Vec<f64>, bool)> {
    if grid.m < 3 || !(grid.hi > grid.lo) {
        return Err(Error::domain("probe grid needs at least 3 nodes on a nonempty interval"));
    }
    let x = GridMeasure::equispaced(grid.lo, grid.hi, grid.m)?;
    let h = (grid.hi - grid.lo) / (grid.m - 1) as f64;
    let averaged = !k.finite_at_origin();
    let sign = match k.regime() {
        Regime::A => 1.0,
        Regime::B => -1.0,
    };
    let m = grid.m;
    let mut a = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            let d = (x[i] - x[j]).abs();
            let v = if averaged { k.power_cell_average(d, h) } else if i == j { 0.0 } else { k.power_term(d) };
            a[i * m + j] = sign * v;
        }
    }
    Ok((a, x, averaged))
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    pairwise_sum(&u.iter().zip(v).map(|(a, b)| a * b).collect::<Vec<_>>())
}

/// Orthonormal basis of the constraints: constants, and for Regime A the
/// centred positions.
pub fn constraint_basis(k: &Kernel, x: &[f64]) -> Vec<Vec<f64>> {
    let m = x.len();
    let ones = vec![1.0 / (m as f64).sqrt(); m];
    let mut basis = vec![ones];
    if k.regime() == Regime::A {
        let mean = pairwise_sum(x) / m as f64;
        let c: Vec<f64> = x.iter().map(|v| v - mean).collect();
        let n = dot(&c, &c).sqrt();
        basis.push(c.iter().map(|v| v / n).collect());
    }
    basis
}

fn project(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let c = dot(v, b);
        for (vi, bi) in v.iter_mut().zip(b) {
            *vi -= c * bi;
        }
    }
}

/// `νᵀ A ν`.
pub fn quadratic_form(a: &[f64], nu: &[f64]) -> f64 {
    let m = nu.len();
    par_row_sum(m, |i| nu[i] * dot(&a[i * m..(i + 1) * m], nu))
}

/// Draws `trials` uniform signed vectors, projects them onto the constraint
/// subspace, normalizes, and records the smallest form value.
pub fn convexity_probe(k: &Kernel, trials: usize, grid: GridSpec, seed: u64) -> Result<ProbeReport> {
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    let (a, x, averaged) = form_matrix(k, grid)?;
    let basis = constraint_basis(k, &x);
    let mut rng = Rng::new(seed);
    let mut min_value = f64::INFINITY;
    let mut skipped = 0;
    let mut all_positive = true;
    for _ in 0..trials {
        let mut nu: Vec<f64> = (0..grid.m).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        project(&mut nu, &basis);
        let norm = dot(&nu, &nu).sqrt();
        if !(norm > 1e-12) {
            skipped += 1;
            continue;
        }
        nu.iter_mut().for_each(|v| *v /= norm);
        let q = quadratic_form(&a, &nu);
        all_positive &= q > 0.0;
        min_value = min_value.min(q);
    }
    Ok(ProbeReport {
        alpha: k.alpha(),
        regime: k.regime(),
        trials,
        skipped,
        min_value,
        cell_averaged: averaged,
        all_positive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};

    /// Smallest eigenvalue of the form restricted to the constraint complement.
    fn projected_min_eigenvalue(k: &Kernel, grid: GridSpec) -> f64 {
        let (a, x, _) = form_matrix(k, grid).unwrap();
        let m = grid.m;
        let basis = constraint_basis(k, &x);
        // complement basis: project the unit vectors and orthonormalize
        let mut comp: Vec<Vec<f64>> = Vec::new();
        for i in 0..m {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            project(&mut e, &basis);
            project(&mut e, &comp);
            project(&mut e, &comp);
            let n = dot(&e, &e).sqrt();
            if n > 1e-8 {
                comp.push(e.iter().map(|v| v / n).collect());
            }
        }
        assert_eq!(comp.len(), m - basis.len());
        let b = DMatrix::from_fn(m, comp.len(), |i, j| comp[j][i]);
        let am = DMatrix::from_row_slice(m, m, &a);
        let reduced = b.transpose() * am * &b;
        SymmetricEigen::new(reduced).eigenvalues.min()
    }

    #[test]
    fn dense_oracle_agrees_with_probes() {
        let grid = GridSpec { lo: -1.0, hi: 1.0, m: 25 };
        for alpha in [2.1, 2.5, 2.9, -0.5, 0.0, 0.5, 1.0, 1.9] {
            let k = Kernel::infer(alpha).unwrap();
            let lam = projected_min_eigenvalue(&k, grid);
            assert!(lam > 0.0, "{alpha}: {lam}");
            let rep = convexity_probe(&k, 200, grid, 5).unwrap();
            assert!(rep.all_positive, "{rep:?}");
            // a unit vector in the subspace cannot beat the smallest eigenvalue
            assert!(rep.min_value >= lam * (1.0 - 1e-9));
        }
    }

    #[test]
    fn regime_a_needs_the_moment_constraint() {
        // with only zero mass, a pure shift direction makes the form negative
        let k = Kernel::infer(2.5).unwrap();
        let grid = GridSpec { lo: -1.0, hi: 1.0, m: 25 };
        let (a, x, _) = form_matrix(&k, grid).unwrap();
        let mean = pairwise_sum(&x) / x.len() as f64;
        let nu: Vec<f64> = x.iter().map(|v| v - mean).collect();
        assert!(quadratic_form(&a, &nu) < 0.0);
    }

    #[test]
    fn two_point_log_example() {
        // ν = (δ₀ − δ₁)/√2 on cells of width 1: −Σνν L = −(L₀ − L₁), L the cell means of ln
        let k = Kernel::new(0.0, Regime::B).unwrap();
        let grid = GridSpec { lo: 0.0, hi: 2.0, m: 3 };
        let (a, _, averaged) = form_matrix(&k, grid).unwrap();
        assert!(averaged);
        let nu = [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0];
        let self_cell = -1.5;
        // mean of ln|1 + U − V| for U, V uniform on [0, 1]
        let neighbour = 2.0 * 2f64.ln() - 1.5;
        let q = quadratic_form(&a, &nu);
        assert!((q - (neighbour - self_cell)).abs() < 1e-12, "{q}");
        assert!((q - 2.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_draws_are_skipped() {
        // three nodes under two constraints leave one direction, never zero in practice
        let k = Kernel::infer(2.5).unwrap();
        let rep = convexity_probe(&k, 50, GridSpec { lo: -1.0, hi: 1.0, m: 3 }, 1).unwrap();
        assert_eq!(rep.skipped, 0);
        assert!(rep.all_positive);
        assert!(convexity_probe(&k, 0, GridSpec { lo: -1.0, hi: 1.0, m: 3 }, 1).is_err());
        assert!(form_matrix(&k, GridSpec { lo: 1.0, hi: -1.0, m: 5 }).is_err());
    }

    #[test]
    fn seeded_and_repeatable() {
        let k = Kernel::infer(0.5).unwrap();
        let g = GridSpec { lo: -1.0, hi: 1.0, m: 31 };
        assert_eq!(convexity_probe(&k, 100, g, 3).unwrap(), convexity_probe(&k, 100, g, 3).unwrap());
    }
}
