//! Probability measures on the line and the functionals evaluated on them.

use serde::{Deserialize, Serialize};

use crate::closedform::ClosedFormSolution;
use crate::kernel::Kernel;
use crate::quadrature::{gauss_jacobi, integrate_adaptive, Endpoint, Hint, DEFAULT_NODES};
use crate::reduce::{pairwise_sum, par_row_sum};
use crate::{Error, Result};

const MASS_TOL: f64 = 1e-12;

/// How atomic self-pairs enter the pair sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule", content = "width")]
pub enum DiagonalRule {
    /// `K(0)` counted (it is 0 whenever finite).
    Included,
    /// Self-pairs dropped; the off-diagonal objective.
    Excluded,
    /// Each atom stands for a uniform cell of the given width and every
    /// pair uses the cell-averaged kernel.
    CellAveraged(f64),
}

impl DiagonalRule {
    /// Included when `K(0)` is finite, excluded otherwise.
    pub fn natural(k: &Kernel) -> Self {
        if k.finite_at_origin() {
            DiagonalRule::Included
        } else {
            DiagonalRule::Excluded
        }
    }

    /// Pair weight `K` for atoms at distance `d`; `same` marks self-pairs.
    pub(crate) fn pair(&self, k: &Kernel, d: f64, same: bool) -> f64 {
        match *self {
            DiagonalRule::CellAveraged(h) => k.cell_average(d, h),
            DiagonalRule::Excluded if same => 0.0,
            _ => k.value_unchecked(d),
        }
    }
}

fn check_mass(weights: &[f64]) -> Result<()> {
    let total = pairwise_sum(weights);
    if (total - 1.0).abs() > MASS_TOL {
        return Err(Error::domain(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

/// Atoms with positive weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    positions: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(positions: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if positions.is_empty() || positions.len() != weights.len() {
            return Err(Error::domain(format!(
                "need equally many positions and weights (at least one), got {} and {}",
                positions.len(),
                weights.len()
            )));
        }
        if positions.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("positions must be finite"));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::domain("atom weights must be positive"));
        }
        check_mass(&weights)?;
        Ok(DiscreteMeasure { positions, weights })
    }

    /// Equal weights `1/n`.
    pub fn uniform(positions: Vec<f64>) -> Result<Self> {
        let n = positions.len().max(1);
        let w = vec![1.0 / n as f64; positions.len()];
        DiscreteMeasure::new(positions, w)
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Weights on a fixed increasing grid; zero weights allowed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridMeasure {
    grid: Vec<f64>,
    weights: Vec<f64>,
}

impl GridMeasure {
    pub fn new(grid: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if grid.is_empty() || grid.len() != weights.len() {
            return Err(Error::domain(format!(
                "grid and weights must have equal nonzero length, got {} and {}",
                grid.len(),
                weights.len()
            )));
        }
        if grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::domain("grid must be finite and strictly increasing"));
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::domain("grid weights must be nonnegative"));
        }
        check_mass(&weights)?;
        Ok(GridMeasure { grid, weights })
    }

    /// `m` equispaced nodes on `[lo, hi]`.
    pub fn equispaced(lo: f64, hi: f64, m: usize) -> Result<Vec<f64>> {
        if m == 1 {
            return Ok(vec![0.5 * (lo + hi)]);
        }
        if m == 0 || !(lo < hi) {
            return Err(Error::domain(format!("bad grid [{lo}, {hi}] with {m} points")));
        }
        let h = (hi - lo) / (m - 1) as f64;
        Ok((0..m).map(|i| if i + 1 == m { hi } else { lo + h * i as f64 }).collect())
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Mean node spacing.
    pub fn spacing(&self) -> f64 {
        let m = self.grid.len();
        if m < 2 {
            return 0.0;
        }
        (self.grid[m - 1] - self.grid[0]) / (m - 1) as f64
    }
}

/// Any of the three representations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Measure {
    Discrete(DiscreteMeasure),
    Grid(GridMeasure),
    ClosedForm(ClosedFormSolution),
}

/// Atoms as (position, weight) slices; `None` for the closed form.
fn atoms(mu: &Measure) -> Option<(&[f64], &[f64])> {
    match mu {
        Measure::Discrete(d) => Some((&d.positions, &d.weights)),
        Measure::Grid(g) => Some((&g.grid, &g.weights)),
        Measure::ClosedForm(_) => None,
    }
}

/// `½ Σᵢ Σⱼ wᵢ wⱼ K(|xᵢ − xⱼ|)` under a diagonal rule. Rows are summed in
/// index order and combined with the fixed pairwise tree.
pub fn atomic_energy(k: &Kernel, positions: &[f64], weights: &[f64], rule: DiagonalRule) -> f64 {
    let n = positions.len();
    let total = par_row_sum(n, |i| {
        let xi = positions[i];
        let mut row = 0.0;
        for j in 0..n {
            row += weights[j] * rule.pair(k, (xi - positions[j]).abs(), i == j);
        }
        weights[i] * row
    });
    0.5 * total
}

/// `Σⱼ wⱼ K(|x − xⱼ|)`. Infinite when `x` sits on an atom and `K(0) = ∞`.
pub fn atomic_potential(k: &Kernel, positions: &[f64], weights: &[f64], x: f64) -> f64 {
    let terms: Vec<f64> = positions.iter().zip(weights).map(|(&y, &w)| w * k.value_unchecked((x - y).abs())).collect();
    pairwise_sum(&terms)
}

impl Measure {
    /// Interaction energy. Atomic inputs use [`DiagonalRule::natural`]; the
    /// closed form returns its exact energy, or the quadrature value for the
    /// log kernel.
    pub fn energy(&self, k: &Kernel) -> Result<f64> {
        match self {
            Measure::ClosedForm(s) => match s.energy {
                Some(e) => Ok(e),
                None => energy_quadrature(s),
            },
            _ => Ok(self.energy_with(k, DiagonalRule::natural(k))),
        }
    }

    /// Atomic energy under an explicit diagonal rule; the closed form ignores
    /// the rule and integrates.
    pub fn energy_with(&self, k: &Kernel, rule: DiagonalRule) -> f64 {
        match atoms(self) {
            Some((x, w)) => atomic_energy(k, x, w, rule),
            None => match self {
                Measure::ClosedForm(s) => energy_quadrature(s).unwrap_or(f64::NAN),
                _ => unreachable!(),
            },
        }
    }

    pub fn potential_at(&self, k: &Kernel, x: f64) -> Result<f64> {
        match atoms(self) {
            Some((pos, w)) => Ok(atomic_potential(k, pos, w, x)),
            None => match self {
                Measure::ClosedForm(s) => s.potential_by_quadrature(x),
                _ => unreachable!(),
            },
        }
    }

    pub fn center_of_mass(&self) -> f64 {
        match atoms(self) {
            Some((x, w)) => {
                let terms: Vec<f64> = x.iter().zip(w).map(|(x, w)| x * w).collect();
                pairwise_sum(&terms)
            }
            None => match self {
                Measure::ClosedForm(s) => s.center,
                _ => unreachable!(),
            },
        }
    }

    /// Second moment about the centre of mass.
    pub fn central_second_moment(&self) -> f64 {
        match atoms(self) {
            Some((x, w)) => {
                let c = self.center_of_mass();
                let terms: Vec<f64> = x.iter().zip(w).map(|(x, w)| w * (x - c) * (x - c)).collect();
                pairwise_sum(&terms)
            }
            None => match self {
                Measure::ClosedForm(s) => s.second_moment(),
                _ => unreachable!(),
            },
        }
    }

    /// The measure pushed forward by `x ↦ x + t`.
    pub fn translate(&self, t: f64) -> Measure {
        match self {
            Measure::Discrete(d) => Measure::Discrete(DiscreteMeasure {
                positions: d.positions.iter().map(|x| x + t).collect(),
                weights: d.weights.clone(),
            }),
            Measure::Grid(g) => Measure::Grid(GridMeasure {
                grid: g.grid.iter().map(|x| x + t).collect(),
                weights: g.weights.clone(),
            }),
            Measure::ClosedForm(s) => Measure::ClosedForm(ClosedFormSolution { center: s.center + t, ..*s }),
        }
    }

    /// Support bounds `[lo, hi]` (of the atoms with positive weight).
    pub fn support(&self) -> (f64, f64) {
        match atoms(self) {
            Some((x, w)) => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for (&x, &w) in x.iter().zip(w) {
                    if w > 0.0 {
                        lo = lo.min(x);
                        hi = hi.max(x);
                    }
                }
                (lo, hi)
            }
            None => match self {
                Measure::ClosedForm(s) => (s.center - s.radius, s.center + s.radius),
                _ => unreachable!(),
            },
        }
    }
}

/// `½ ∫ φ dμ` for the closed form, with the outer integral on the Gauss–Jacobi
/// rule of the density profile and `φ` by adaptive quadrature at each node.
pub fn energy_quadrature(s: &ClosedFormSolution) -> Result<f64> {
    energy_quadrature_with(s, DEFAULT_NODES)
}

pub fn energy_quadrature_with(s: &ClosedFormSolution, nodes: usize) -> Result<f64> {
    let rule = gauss_jacobi(nodes, s.profile_exponent())?;
    let values: Vec<Result<f64>> = crate::reduce::par_rows(rule.len(), |i| {
        let x = s.center + s.radius * rule.nodes[i];
        s.potential_by_quadrature(x).map(|phi| rule.weights[i] * phi)
    });
    let terms = values.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(0.5 * pairwise_sum(&terms) / s.constants.profile_mass)
}

/// Sorted atoms with merged duplicates.
fn sorted_atoms(x: &[f64], w: &[f64]) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = x.iter().copied().zip(w.iter().copied()).filter(|p| p.1 > 0.0).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v
}

/// `∫ |F − G|` for two atomic CDFs, exact.
fn w1_atomic(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let mut events: Vec<(f64, f64)> = a.iter().copied().chain(b.iter().map(|&(x, w)| (x, -w))).collect();
    events.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut diff = 0.0;
    let mut pieces = Vec::with_capacity(events.len());
    for win in 0..events.len() {
        diff += events[win].1;
        if win + 1 < events.len() {
            pieces.push(diff.abs() * (events[win + 1].0 - events[win].0));
        }
    }
    pairwise_sum(&pieces)
}

/// `∫_lo^hi |c − F|` for the closed-form CDF `F` and a constant `c`.
fn constant_vs_cdf(s: &ClosedFormSolution, c: f64, lo: f64, hi: f64) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    let int = |x: f64| s.cdf_integral(x);
    // ∫ (c − F) over a piece where the sign is fixed
    let signed = |a: f64, b: f64| c * (b - a) - (int(b) - int(a));
    let f_lo = s.cdf(lo);
    let f_hi = s.cdf(hi);
    if c <= f_lo || c >= f_hi {
        return signed(lo, hi).abs();
    }
    // F crosses c inside (lo, hi); locate by bisection
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if !(m > a && m < b) {
            break;
        }
        if s.cdf(m) < c {
            a = m;
        } else {
            b = m;
        }
    }
    let cross = 0.5 * (a + b);
    signed(lo, cross).abs() + signed(cross, hi).abs()
}

fn w1_atomic_closed(a: &[(f64, f64)], s: &ClosedFormSolution) -> f64 {
    let lo = (s.center - s.radius).min(a.first().map_or(f64::INFINITY, |p| p.0));
    let hi = (s.center + s.radius).max(a.last().map_or(f64::NEG_INFINITY, |p| p.0));
    let mut pieces = Vec::with_capacity(a.len() + 1);
    let mut level = 0.0;
    let mut left = lo;
    for &(x, w) in a {
        pieces.push(constant_vs_cdf(s, level, left, x));
        level += w;
        left = x;
    }
    pieces.push(constant_vs_cdf(s, level.min(1.0), left, hi));
    pairwise_sum(&pieces)
}

fn w1_closed(s: &ClosedFormSolution, t: &ClosedFormSolution) -> Result<f64> {
    if s.kernel == t.kernel {
        return Ok((s.center - t.center).abs());
    }
    let lo = (s.center - s.radius).min(t.center - t.radius);
    let hi = (s.center + s.radius).max(t.center + t.radius);
    integrate_adaptive(|x| (s.cdf(x) - t.cdf(x)).abs(), lo, hi, 1e-12, Hint::both(Endpoint::Regular, Endpoint::Regular))
}

/// `∫ |F_μ − F_ν| dx`.
pub fn wasserstein1(mu: &Measure, nu: &Measure) -> Result<f64> {
    match (atoms(mu), atoms(nu)) {
        (Some((x, w)), Some((y, v))) => Ok(w1_atomic(&sorted_atoms(x, w), &sorted_atoms(y, v))),
        (Some((x, w)), None) | (None, Some((x, w))) => {
            let s = match (mu, nu) {
                (Measure::ClosedForm(s), _) | (_, Measure::ClosedForm(s)) => s,
                _ => unreachable!(),
            };
            Ok(w1_atomic_closed(&sorted_atoms(x, w), s))
        }
        (None, None) => match (mu, nu) {
            (Measure::ClosedForm(s), Measure::ClosedForm(t)) => w1_closed(s, t),
            _ => unreachable!(),
        },
    }
}
