use serde::Serialize;

use super::{compare, Method, SolveError, SolveReport, Termination};
use crate::kernel::Kernel;
use crate::measure::{DiagonalRule, GridMeasure, Measure};
use crate::reduce::{pairwise_sum, par_rows};
use crate::{Error, Result};

/// How the pair matrix is formed on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Discretization {
    /// Point values where `K(0)` is finite, cell averages otherwise.
    Auto,
    /// `G_ij = K(|x_i − x_j|)`.
    PointValues,
    /// `G_ij` = mean of `K` over the two grid cells.
    CellAveraged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FwVariant {
    /// Move mass from the heaviest-potential active node to the lightest.
    Pairwise,
    /// Classical step towards the best vertex.
    Vanilla,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FwOpts {
    pub lo: f64,
    pub hi: f64,
    pub m: usize,
    pub max_iters: usize,
    pub gap_tol: f64,
    /// Translate the iterate to centre of mass 0 after each step, keeping
    /// the translation only when it does not raise the energy.
    pub recenter_each_iter: bool,
    pub discretization: Discretization,
    pub variant: FwVariant,
}

impl Default for FwOpts {
    fn default() -> Self {
        FwOpts {
            lo: -2.0,
            hi: 2.0,
            m: 801,
            max_iters: 10_000,
            gap_tol: 1e-8,
            recenter_each_iter: false,
            discretization: Discretization::Auto,
            variant: FwVariant::Pairwise,
        }
    }
}

impl FwOpts {
    fn validate(&self) -> Result<()> {
        if self.m == 1 {
            return Ok(());
        }
        if !(self.lo < self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::domain(format!("grid needs lo < hi, got [{}, {}]", self.lo, self.hi)));
        }
        if self.m < 3 {
            return Err(Error::domain(format!("grid needs at least 3 points, got {}", self.m)));
        }
        if !(self.gap_tol > 0.0) {
            return Err(Error::domain("gap_tol must be positive"));
        }
        Ok(())
    }
}

struct Problem {
    x: Vec<f64>,
    /// Row-major `m × m` pair matrix.
    gram: Vec<f64>,
    m: usize,
}

impl Problem {
    fn row(&self, i: usize) -> &[f64] {
        &self.gram[i * self.m..(i + 1) * self.m]
    }

    /// `φ = G w`.
    fn potential(&self, w: &[f64]) -> Vec<f64> {
        par_rows(self.m, |i| {
            let terms: Vec<f64> = self.row(i).iter().zip(w).map(|(g, w)| g * w).collect();
            pairwise_sum(&terms)
        })
    }

    /// `½ wᵀ φ`.
    fn energy(w: &[f64], phi: &[f64]) -> f64 {
        let terms: Vec<f64> = w.iter().zip(phi).map(|(w, p)| w * p).collect();
        0.5 * pairwise_sum(&terms)
    }
}

fn build(k: &Kernel, opts: &FwOpts) -> Result<(Problem, DiagonalRule)> {
    let x = GridMeasure::equispaced(opts.lo, opts.hi, opts.m)?;
    let m = x.len();
    let h = if m > 1 { (opts.hi - opts.lo) / (m - 1) as f64 } else { 1.0 };
    let cell = match opts.discretization {
        Discretization::Auto => !k.finite_at_origin(),
        Discretization::PointValues => false,
        Discretization::CellAveraged => true,
    };
    if !cell && !k.finite_at_origin() {
        return Err(Error::domain("point-value pair matrix is infinite on the diagonal for alpha <= 0"));
    }
    let rule = if cell { DiagonalRule::CellAveraged(h) } else { DiagonalRule::Included };
    // entries depend on |i − j| only
    let by_offset: Vec<f64> = (0..m).map(|d| rule.pair(k, d as f64 * h, d == 0)).collect();
    let mut gram = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            gram[i * m + j] = by_offset[i.abs_diff(j)];
        }
    }
    Ok((Problem { x, gram, m }, rule))
}

/// Index of the smallest entry; the lowest index wins ties.
fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] < v[best] {
            best = i;
        }
    }
    best
}

/// Index of the largest potential among nodes carrying mass.
fn active_argmax(phi: &[f64], w: &[f64]) -> usize {
    let mut best = usize::MAX;
    for i in 0..phi.len() {
        if w[i] > 0.0 && (best == usize::MAX || phi[i] > phi[best]) {
            best = i;
        }
    }
    best
}

/// Weights translated by `−shift` through linear interpolation between
/// neighbouring nodes; `None` if mass would leave the grid.
fn translated(w: &[f64], shift_cells: f64) -> Option<Vec<f64>> {
    let m = w.len();
    let k = shift_cells.floor();
    let theta = shift_cells - k;
    let k = k as isize;
    let mut out = vec![0.0; m];
    for (i, &wi) in w.iter().enumerate() {
        if wi == 0.0 {
            continue;
        }
        let j = i as isize - k;
        // mass at node i moves to position i − shift = j − θ
        for (target, frac) in [(j, 1.0 - theta), (j - 1, theta)] {
            if frac == 0.0 {
                continue;
            }
            if target < 0 || target >= m as isize {
                return None;
            }
            out[target as usize] += wi * frac;
        }
    }
    Some(out)
}

/// Frank–Wolfe on the simplex of grid weights for `½ wᵀ G w`, starting from
/// uniform weights.
pub fn solve_grid_fw(k: &Kernel, opts: &FwOpts) -> std::result::Result<(GridMeasure, SolveReport), SolveError> {
    opts.validate()?;
    let (problem, rule) = build(k, opts)?;
    let m = problem.m;
    let mut w = vec![1.0 / m as f64; m];
    let mut phi = problem.potential(&w);
    let initial_energy = Problem::energy(&w, &phi);
    let mut energy = initial_energy;
    let h = if m > 1 { problem.x[1] - problem.x[0] } else { 1.0 };
    let mut iterations = 0;
    let mut gap;
    let termination;
    loop {
        let eta = 2.0 * energy;
        let s = argmin(&phi);
        gap = eta - phi[s];
        if gap < opts.gap_tol {
            termination = Termination::Converged;
            break;
        }
        if iterations >= opts.max_iters {
            termination = Termination::MaxIterations;
            break;
        }
        let gs = problem.row(s);
        match opts.variant {
            FwVariant::Pairwise => {
                let v = active_argmax(&phi, &w);
                let gv = problem.row(v);
                let slope = phi[s] - phi[v];
                let curvature = gs[s] + gv[v] - 2.0 * gs[v];
                let cap = w[v];
                let step = if curvature > 0.0 { (-slope / curvature).min(cap) } else { cap };
                if step > 0.0 {
                    w[s] += step;
                    w[v] = if step == cap { 0.0 } else { w[v] - step };
                    for i in 0..m {
                        phi[i] += step * (gs[i] - gv[i]);
                    }
                }
            }
            FwVariant::Vanilla => {
                // direction e_s − w: slope φ_s − η, curvature G_ss − 2φ_s + η
                let slope = phi[s] - eta;
                let curvature = gs[s] - 2.0 * phi[s] + eta;
                let step = if curvature > 0.0 { (-slope / curvature).min(1.0) } else { 1.0 };
                for i in 0..m {
                    w[i] *= 1.0 - step;
                    phi[i] = (1.0 - step) * phi[i] + step * gs[i];
                }
                w[s] += step;
            }
        }
        iterations += 1;
        // refresh the running potential against drift
        if iterations % 100 == 0 {
            phi = problem.potential(&w);
        }
        let next = Problem::energy(&w, &phi);
        assert!(next <= energy + 1e-15 * energy.abs().max(1.0), "Frank-Wolfe step raised the energy");
        energy = next.min(energy);
        if opts.recenter_each_iter && m > 1 {
            let c = pairwise_sum(&w.iter().zip(&problem.x).map(|(w, x)| w * x).collect::<Vec<_>>());
            if c.abs() > 1e-3 * h {
                if let Some(shifted) = translated(&w, c / h) {
                    let shifted_phi = problem.potential(&shifted);
                    let shifted_energy = Problem::energy(&shifted, &shifted_phi);
                    if shifted_energy <= energy {
                        w = shifted;
                        phi = shifted_phi;
                        energy = shifted_energy;
                    }
                }
            }
        }
    }
    phi = problem.potential(&w);
    let final_energy = Problem::energy(&w, &phi);
    gap = 2.0 * final_energy - phi[argmin(&phi)];
    // renormalize rounding drift before validation
    let total = pairwise_sum(&w);
    let w: Vec<f64> = w.iter().map(|v| v / total).collect();
    let mu = GridMeasure::new(problem.x.clone(), w)?;
    let cmp = compare(k, &Measure::Grid(mu.clone()))?;
    let energy_gap = final_energy - cmp.reference;
    let report = SolveReport {
        method: Method::Grid,
        alpha: k.alpha(),
        regime: k.regime(),
        initial_energy,
        final_energy,
        reference_energy: cmp.reference,
        reference_empirical: cmp.empirical,
        energy_gap,
        relative_gap: energy_gap.abs() / cmp.reference.abs(),
        iterations,
        termination,
        residual: gap,
        wasserstein1: cmp.w1,
        diagonal: rule,
    };
    if termination == Termination::Converged {
        Ok((mu, report))
    } else {
        Err(SolveError::BudgetExhausted(Box::new((mu, report))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::build_solution;
    use crate::kernel::Regime;

    fn opts_for(k: &Kernel, m: usize) -> FwOpts {
        let r = build_solution(*k, 0.0).unwrap().radius;
        FwOpts { lo: -2.0 * r, hi: 2.0 * r, m, gap_tol: 1e-6, ..Default::default() }
    }

    #[test]
    fn single_node() {
        let k = Kernel::new(2.5, Regime::A).unwrap();
        let (mu, report) = solve_grid_fw(&k, &FwOpts { lo: 0.0, hi: 0.0, m: 1, ..Default::default() }).unwrap();
        assert_eq!(mu.weights(), &[1.0]);
        assert_eq!(report.final_energy, 0.0);
    }

    #[test]
    fn uniform_case_on_interval() {
        let k = Kernel::new(1.0, Regime::B).unwrap();
        let opts = FwOpts { lo: -2.0, hi: 2.0, m: 801, gap_tol: 1e-8, ..Default::default() };
        let (mu, report) = solve_grid_fw(&k, &opts).unwrap();
        assert!((report.final_energy + 1.0 / 6.0).abs() < 1e-4, "{report:?}");
        assert!(report.final_energy <= report.initial_energy);
        // mass outside [−1, 1] is negligible
        let outside: f64 = mu.grid().iter().zip(mu.weights()).filter(|(x, _)| x.abs() > 1.0 + 0.01).map(|(_, w)| w).sum();
        assert!(outside < 1e-6);
    }

    #[test]
    fn log_kernel_cell_averaged() {
        let k = Kernel::new(0.0, Regime::B).unwrap();
        let (_, report) = solve_grid_fw(&k, &opts_for(&k, 201)).unwrap();
        assert!(matches!(report.diagonal, DiagonalRule::CellAveraged(_)));
        assert!(report.energy_gap.abs() < 1e-4, "{report:?}");
        assert!(report.residual <= 1e-6);
        let bad = FwOpts { discretization: Discretization::PointValues, ..opts_for(&k, 51) };
        assert!(solve_grid_fw(&k, &bad).is_err());
    }

    #[test]
    fn near_two_point_limit() {
        let k = Kernel::new(2.9, Regime::A).unwrap();
        let s = build_solution(k, 0.0).unwrap();
        let opts = FwOpts { lo: -1.0, hi: 1.0, m: 401, gap_tol: 1e-6, max_iters: 20_000, ..Default::default() };
        let (mu, _) = match solve_grid_fw(&k, &opts) {
            Ok(v) => v,
            Err(SolveError::BudgetExhausted(b)) => *b,
            Err(e) => panic!("{e}"),
        };
        let g = Measure::Grid(mu);
        let c = g.center_of_mass();
        assert!((g.central_second_moment() - s.second_moment()).abs() < 5e-3);
        let (lo, hi) = g.support();
        assert!((hi - c - s.radius).abs() < 0.03 && (c - lo - s.radius).abs() < 0.03, "{lo} {hi}");
    }

    #[test]
    fn budget_exhaustion_returns_iterate() {
        let k = Kernel::new(2.5, Regime::A).unwrap();
        let opts = FwOpts { max_iters: 5, ..opts_for(&k, 101) };
        match solve_grid_fw(&k, &opts) {
            Err(SolveError::BudgetExhausted(b)) => {
                assert_eq!(b.1.iterations, 5);
                assert_eq!(b.1.termination, Termination::MaxIterations);
                assert!(b.1.final_energy <= b.1.initial_energy);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn vanilla_also_descends() {
        let k = Kernel::new(1.0, Regime::B).unwrap();
        let opts = FwOpts { variant: FwVariant::Vanilla, max_iters: 300, ..opts_for(&k, 101) };
        let report = match solve_grid_fw(&k, &opts) {
            Ok((_, r)) => r,
            Err(SolveError::BudgetExhausted(b)) => b.1,
            Err(e) => panic!("{e}"),
        };
        assert!(report.final_energy < report.initial_energy);
        assert!(report.energy_gap < 1e-2);
    }

    #[test]
    fn recentering_keeps_descent() {
        let k = Kernel::new(2.5, Regime::A).unwrap();
        let opts = FwOpts { recenter_each_iter: true, ..opts_for(&k, 201) };
        let (mu, report) = solve_grid_fw(&k, &opts).unwrap();
        assert!(Measure::Grid(mu).center_of_mass().abs() < 0.05);
        assert!(report.energy_gap.abs() < 1e-4, "{report:?}");
    }

    #[test]
    fn translation_helper() {
        let w = vec![0.0, 0.5, 0.5, 0.0, 0.0];
        let t = translated(&w, -1.0).unwrap();
        assert_eq!(t, vec![0.0, 0.0, 0.5, 0.5, 0.0]);
        let t = translated(&w, 0.5).unwrap();
        assert_eq!(t, vec![0.25, 0.5, 0.25, 0.0, 0.0]);
        assert!(translated(&w, 2.0).is_none());
    }
}
