//! Pair interaction kernels.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which of the two kernel families is in use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `2 < α < 3`: `K(r) = r^α/α − r²/2` (power attraction, quadratic repulsion).
    A,
    /// `−1 < α < 2`: `K(r) = r²/2 − r^α/α`, with `ln r` in place of `r^α/α` at `α = 0`.
    B,
}

impl Regime {
    /// Open interval of admissible exponents.
    pub fn alpha_range(self) -> (f64, f64) {
        match self {
            Regime::A => (2.0, 3.0),
            Regime::B => (-1.0, 2.0),
        }
    }

    pub fn admits(self, alpha: f64) -> bool {
        let (lo, hi) = self.alpha_range();
        alpha > lo && alpha < hi
    }

    /// The regime whose interval contains `alpha`, if any.
    pub fn for_alpha(alpha: f64) -> Option<Regime> {
        [Regime::A, Regime::B].into_iter().find(|r| r.admits(alpha))
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::A => "A",
            Regime::B => "B",
        })
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Regime::A),
            "B" | "b" => Ok(Regime::B),
            other => Err(Error::domain(format!("unknown regime {other:?} (expected A or B)"))),
        }
    }
}

/// An interaction kernel: exponent plus regime. Construction enforces that
/// `alpha` lies strictly inside the regime's interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    alpha: f64,
    regime: Regime,
}

impl Kernel {
    pub fn new(alpha: f64, regime: Regime) -> Result<Self> {
        if !regime.admits(alpha) {
            let (lo, hi) = regime.alpha_range();
            return Err(Error::domain(format!(
                "alpha = {alpha} is outside the open interval ({lo}, {hi}) of regime {regime}"
            )));
        }
        Ok(Kernel { alpha, regime })
    }

    /// Kernel for `alpha` with the regime inferred from the exponent.
    pub fn infer(alpha: f64) -> Result<Self> {
        let regime = Regime::for_alpha(alpha)
            .ok_or_else(|| Error::domain(format!("alpha = {alpha} lies in neither (2, 3) nor (-1, 2)")))?;
        Kernel::new(alpha, regime)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// True for the logarithmic kernel (`α = 0` exactly, regime B).
    pub fn is_log(&self) -> bool {
        self.alpha == 0.0
    }

    /// Whether `K(0)` is finite, i.e. atoms carry finite self-energy.
    pub fn finite_at_origin(&self) -> bool {
        self.regime == Regime::A || self.alpha > 0.0
    }

    /// `r^α / α`, or `ln r` for the log kernel.
    pub fn power_term(&self, r: f64) -> f64 {
        if self.is_log() {
            r.ln()
        } else {
            r.powf(self.alpha) / self.alpha
        }
    }

    /// `K(r)`; `+∞` at `r = 0` when `α ≤ 0`.
    pub fn value(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::domain(format!("kernel distance must be nonnegative, got {r}")));
        }
        Ok(self.value_unchecked(r))
    }

    pub(crate) fn value_unchecked(&self, r: f64) -> f64 {
        if r == 0.0 {
            return if self.finite_at_origin() { 0.0 } else { f64::INFINITY };
        }
        match self.regime {
            Regime::A => self.power_term(r) - 0.5 * r * r,
            Regime::B => 0.5 * r * r - self.power_term(r),
        }
    }

    /// `K'(r)` for `r > 0`.
    pub fn derivative(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::domain(format!("kernel derivative needs r > 0, got {r}")));
        }
        Ok(self.derivative_unchecked(r))
    }

    pub(crate) fn derivative_unchecked(&self, r: f64) -> f64 {
        let power = r.powf(self.alpha - 1.0);
        match self.regime {
            Regime::A => power - r,
            Regime::B => r - power,
        }
    }

    /// Even second antiderivative `Φ` of `t ↦ K(|t|)` with `Φ(0) = 0`.
    ///
    /// `(Φ(d+h) − 2Φ(d) + Φ(d−h)) / h²` is the average of `K(|x − y|)` over
    /// two cells of width `h` whose centres are `d` apart.
    pub(crate) fn second_antiderivative(&self, t: f64) -> f64 {
        let t = t.abs();
        let quadratic = t.powi(4) / 24.0;
        let power = self.power_second_antiderivative(t);
        match self.regime {
            Regime::A => power - quadratic,
            Regime::B => quadratic - power,
        }
    }

    /// Even second antiderivative of `t ↦ power_term(|t|)`, zero at 0.
    fn power_second_antiderivative(&self, t: f64) -> f64 {
        let t = t.abs();
        if t == 0.0 {
            0.0
        } else if self.is_log() {
            0.5 * t * t * t.ln() - 0.75 * t * t
        } else {
            let a = self.alpha;
            t.powf(a + 2.0) / (a * (a + 1.0) * (a + 2.0))
        }
    }

    /// Cell average of `power_term` alone (`r^α/α` or `ln r`).
    pub fn power_cell_average(&self, d: f64, h: f64) -> f64 {
        let d = d.abs();
        let f = |t: f64| self.power_second_antiderivative(t);
        (f(d + h) - 2.0 * f(d) + f(d - h)) / (h * h)
    }

    /// Mean of `K(|x − y|)` over `x`, `y` uniform in cells of width `h`
    /// centred `d` apart. Finite for every admissible kernel.
    pub fn cell_average(&self, d: f64, h: f64) -> f64 {
        let d = d.abs();
        (self.second_antiderivative(d + h) - 2.0 * self.second_antiderivative(d) + self.second_antiderivative(d - h))
            / (h * h)
    }
}
