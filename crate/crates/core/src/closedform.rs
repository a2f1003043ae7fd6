//! The explicit minimizer: support radius, energy, density, CDF and the
//! potential it generates.
//!
//! Write `ω(y) = (1 − y²)^p` with `p = −(α − 1)/2` for the unit profile. The
//! minimizer centred at `a` is `ρ(x) = C⁻¹ R^{α−2} (R² − (x − a)²)^p` on
//! `|x − a| < R`, where `C = ∫ω` and
//! `R = (C/(2C′))^{1/(α−2)}` with `C′ = ∫|y|^α ω`.

use serde::Serialize;

use crate::kernel::{Kernel, Regime};
use crate::quadrature::{integrate_with_distances, Abscissa, Endpoint, Hint};
use crate::specfun::{gamma, ln_gamma, reg_inc_beta, sinc};
use crate::{Error, Result};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Absolute tolerance for the remainder and potential integrals.
const INTEGRAL_TOL: f64 = 1e-12;

/// Beta-type integrals of the unit profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants {
    pub alpha: f64,
    /// `∫ ω = √π Γ((3−α)/2) / Γ((4−α)/2)`.
    pub profile_mass: f64,
    /// `∫ |y|^α ω = t / sin t`, `t = (α−1)π/2`.
    pub power_moment: f64,
    /// `∫ y² ω`; equals `profile_mass / (4 − α)`.
    pub second_moment_mass: f64,
    /// Constant value of `∫ |x−y|^{α−2} ω(y) dy` for `|x| < 1`:
    /// `π / sin((α−1)π/2)`. Negative for `α < 1`, infinite at `α = 1`.
    pub interior_constant: f64,
    /// Offset added outside the support in the `|x−y|^{α−2}` integral:
    /// `−C Γ((α−1)/2) Γ((4−α)/2) / √π`. Infinite at `α = 1`.
    pub exterior_offset: f64,
    /// Leading coefficient of the Regime B remainder,
    /// `C Γ((α+1)/2) Γ((4−α)/2) / √π`.
    pub tail_quadratic: f64,
}

impl Constants {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0 && alpha < 3.0) {
            return Err(Error::domain(format!("profile constants need -1 < alpha < 3, got {alpha}")));
        }
        let profile_mass = SQRT_PI * (ln_gamma((3.0 - alpha) / 2.0)? - ln_gamma((4.0 - alpha) / 2.0)?).exp();
        let t = (alpha - 1.0) * std::f64::consts::FRAC_PI_2;
        let power_moment = 1.0 / sinc(t);
        let interior_constant = std::f64::consts::PI / t.sin();
        let shared = profile_mass * gamma((4.0 - alpha) / 2.0)? / SQRT_PI;
        let exterior_offset = if alpha == 1.0 {
            f64::INFINITY
        } else {
            -shared * gamma((alpha - 1.0) / 2.0)?
        };
        Ok(Constants {
            alpha,
            profile_mass,
            power_moment,
            second_moment_mass: profile_mass / (4.0 - alpha),
            interior_constant,
            exterior_offset,
            tail_quadratic: shared * gamma((alpha + 1.0) / 2.0)?,
        })
    }
}

/// The minimizer of a kernel, centred at `center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormSolution {
    pub kernel: Kernel,
    pub center: f64,
    pub radius: f64,
    /// Minimal energy; `None` for the log kernel.
    pub energy: Option<f64>,
    /// Value of the potential on the support, `2 · energy`.
    pub eta: Option<f64>,
    pub constants: Constants,
}

pub fn build_solution(kernel: Kernel, center: f64) -> Result<ClosedFormSolution> {
    if !center.is_finite() {
        return Err(Error::domain(format!("center must be finite, got {center}")));
    }
    let alpha = kernel.alpha();
    let constants = Constants::new(alpha)?;
    let ratio = constants.profile_mass / (2.0 * constants.power_moment);
    let radius = ratio.powf(1.0 / (alpha - 2.0));
    let energy = if kernel.is_log() {
        None
    } else {
        let magnitude = (alpha - 2.0) * radius * radius / (2.0 * alpha * (4.0 - alpha));
        Some(match kernel.regime() {
            Regime::A => -magnitude,
            Regime::B => magnitude,
        })
    };
    Ok(ClosedFormSolution {
        kernel,
        center,
        radius,
        energy,
        eta: energy.map(|e| 2.0 * e),
        constants,
    })
}

impl ClosedFormSolution {
    pub fn alpha(&self) -> f64 {
        self.kernel.alpha()
    }

    pub fn regime(&self) -> Regime {
        self.kernel.regime()
    }

    /// Exponent `p` of the profile `(1 − y²)^p`.
    pub fn profile_exponent(&self) -> f64 {
        -(self.alpha() - 1.0) / 2.0
    }

    pub fn energy(&self) -> Result<f64> {
        self.energy.ok_or(Error::NotAvailable("closed-form energy of the log kernel"))
    }

    pub fn eta(&self) -> Result<f64> {
        self.eta.ok_or(Error::NotAvailable("closed-form potential level of the log kernel"))
    }

    /// `η`, or for the log kernel the quadrature potential at the centre.
    /// The flag is true when the value is the numerical stand-in.
    pub fn eta_reference(&self) -> Result<(f64, bool)> {
        match self.eta {
            Some(eta) => Ok((eta, false)),
            None => Ok((self.potential_by_quadrature(self.center)?, true)),
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        let d = x - self.center;
        let r = self.radius;
        if d.abs() >= r {
            return 0.0;
        }
        // R² − d² factored to keep accuracy near the edges
        let gap = (r - d.abs()) * (r + d.abs());
        r.powf(self.alpha() - 2.0) * gap.powf(self.profile_exponent()) / self.constants.profile_mass
    }

    fn unit_coordinate(&self, x: f64) -> f64 {
        ((x - self.center + self.radius) / (2.0 * self.radius)).clamp(0.0, 1.0)
    }

    fn beta_shape(&self) -> f64 {
        (3.0 - self.alpha()) / 2.0
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let u = self.unit_coordinate(x);
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        let b = self.beta_shape();
        reg_inc_beta(b, b, u).expect("beta parameters are positive")
    }

    /// `∫_{−∞}^x F(s) ds`.
    pub fn cdf_integral(&self, x: f64) -> f64 {
        let lo = self.center - self.radius;
        let hi = self.center + self.radius;
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return self.radius + (x - hi);
        }
        let u = self.unit_coordinate(x);
        let b = self.beta_shape();
        let lower = reg_inc_beta(b, b, u).expect("beta parameters are positive");
        let shifted = reg_inc_beta(b + 1.0, b, u).expect("beta parameters are positive");
        2.0 * self.radius * (u * lower - 0.5 * shifted)
    }

    /// Central second moment `R²/(4 − α)`.
    pub fn second_moment(&self) -> f64 {
        self.radius * self.radius / (4.0 - self.alpha())
    }

    /// `φ(x) = ∫ K(|x − y|) ρ(y) dy` from the explicit remainder:
    /// `η + R^α C⁻¹ r((x − a)/R)` with `r` the regime's remainder function.
    pub fn potential_exact(&self, x: f64) -> Result<f64> {
        let eta = self.eta()?;
        let t = (x - self.center) / self.radius;
        if t.abs() <= 1.0 {
            return Ok(eta);
        }
        let rem = match self.regime() {
            Regime::A => remainder_f(self.alpha(), t)?,
            Regime::B => remainder_g(self.alpha(), t)?,
        };
        Ok(eta + self.radius.powf(self.alpha()) * rem / self.constants.profile_mass)
    }

    /// `φ(x)` by adaptive quadrature of the kernel against the density,
    /// split at `x` when `x` lies inside the support.
    pub fn potential_by_quadrature(&self, x: f64) -> Result<f64> {
        let k = self.kernel;
        let r = self.radius;
        let p = self.profile_exponent();
        let t = (x - self.center) / r;
        let kernel_at = |unit_dist: f64| k.value_unchecked(r * unit_dist);
        let edge = Endpoint::Power(p);
        let kink = Endpoint::Graded(k.alpha().min(1.0));
        let integral = if t > -1.0 && t < 1.0 {
            // [−1, t]: (1+s)^p by the rule, (1−s)^p = (1 − t + to_hi)^p by hand
            let left = integrate_with_distances(
                |a: Abscissa| kernel_at(a.to_hi) * ((1.0 - t) + a.to_hi).powf(p),
                -1.0,
                t,
                INTEGRAL_TOL,
                Hint::both(edge, kink),
            )?;
            let right = integrate_with_distances(
                |a: Abscissa| kernel_at(a.from_lo) * ((1.0 + t) + a.from_lo).powf(p),
                t,
                1.0,
                INTEGRAL_TOL,
                Hint::both(kink, edge),
            )?;
            left.value + right.value
        } else {
            let dist = |a: Abscissa| {
                if t >= 1.0 {
                    (t - 1.0) + a.to_hi
                } else {
                    (-1.0 - t) + a.from_lo
                }
            };
            integrate_with_distances(|a: Abscissa| kernel_at(dist(a)), -1.0, 1.0, INTEGRAL_TOL, Hint::both(edge, edge))?.value
        };
        Ok(integral / self.constants.profile_mass)
    }
}

/// Tolerance scaled to the quadratic growth of the remainders.
fn remainder_tol(x: f64) -> f64 {
    INTEGRAL_TOL * x.max(1.0).powi(2)
}

/// `∫_1^X (y²−1)^{−(3−α)/2} (X − y)² dy` via `y = cosh u`.
fn quadratic_tail_moment(alpha: f64, x: f64) -> Result<f64> {
    let top = x.acosh();
    let s = alpha - 2.0;
    let integrand = |a: Abscissa| {
        let u = a.from_lo;
        // X − cosh u = 2 sinh((U+u)/2) sinh((U−u)/2)
        let gap = 2.0 * (0.5 * (top + u)).sinh() * (0.5 * a.to_hi).sinh();
        sinh_ratio(u).powf(s) * gap * gap
    };
    Ok(integrate_with_distances(integrand, 0.0, top, remainder_tol(x), Hint::left(Endpoint::Power(s)))?.value)
}

/// `sinh(u)/u`, accurate at small `u`.
fn sinh_ratio(u: f64) -> f64 {
    if u < 1e-4 {
        1.0 + u * u / 6.0
    } else {
        u.sinh() / u
    }
}

/// Excess of the potential over its support value in Regime A, in units of
/// `R^α / C`:
/// `((α−1)(α−2)/2) · C · ∫_1^{|t|} (y²−1)^{−(3−α)/2} (|t| − y)² dy` for
/// `|t| > 1`, zero otherwise. Defined for `1 < α < 3`.
pub fn remainder_f(alpha: f64, t: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha < 3.0) {
        return Err(Error::domain(format!("remainder f needs 1 < alpha < 3, got {alpha}")));
    }
    let x = t.abs();
    if x <= 1.0 {
        return Ok(0.0);
    }
    let c = Constants::new(alpha)?;
    Ok(0.5 * (alpha - 1.0) * (alpha - 2.0) * c.profile_mass * quadratic_tail_moment(alpha, x)?)
}

/// `∫_X^∞ (w²−1)^{−(3−α)/2} dw` for `α < 2`, via `w = (v + 1/v)/2`.
fn power_tail(alpha: f64, x: f64) -> Result<f64> {
    let root = ((x - 1.0) * (x + 1.0)).sqrt();
    let top = 1.0 / (x + root);
    let gap_at_top = (x - 1.0 + root) / (x + root);
    let integrand = |a: Abscissa| {
        let one_minus = gap_at_top + a.to_hi;
        (one_minus * (2.0 - one_minus)).powf(alpha - 2.0)
    };
    let est = integrate_with_distances(integrand, 0.0, top, INTEGRAL_TOL, Hint::left(Endpoint::Power(1.0 - alpha)))?;
    Ok(2f64.powf(2.0 - alpha) * est.value)
}

/// `∫_1^X ∫_1^y ∫_z^∞ (w²−1)^{−(3−α)/2} dw dz dy`, reduced by integrating
/// by parts to one tail value plus a single integral over `[1, X]`.
fn iterated_tail(alpha: f64, x: f64) -> Result<f64> {
    let top = x.acosh();
    let integrand = |a: Abscissa| {
        let u = a.from_lo;
        let half = (0.5 * u).sinh() / (0.5 * u).max(f64::MIN_POSITIVE);
        let half = if u < 1e-4 { 1.0 + u * u / 24.0 } else { half };
        // (cosh u − 1)/u² · (2X − 1 − cosh u)
        let lower = 0.5 * half * half;
        let upper = 2.0 * x - 1.0 - u.cosh();
        sinh_ratio(u).powf(alpha - 2.0) * lower * upper
    };
    let near = integrate_with_distances(integrand, 0.0, top, remainder_tol(x), Hint::left(Endpoint::Power(alpha)))?.value;
    let d = x - 1.0;
    Ok(0.5 * near + 0.5 * d * d * power_tail(alpha, x)?)
}

/// Excess of the potential over its support value in Regime B, in units of
/// `R^α / C`:
/// `D (|t|−1)² + (α−1)(α−2) C ∭` for `|t| > 1`, zero otherwise, where `∭`
/// is the iterated tail integral. Defined for `−1 < α < 2`.
pub fn remainder_g(alpha: f64, t: f64) -> Result<f64> {
    if !(alpha > -1.0 && alpha < 2.0) {
        return Err(Error::domain(format!("remainder g needs -1 < alpha < 2, got {alpha}")));
    }
    let x = t.abs();
    if x <= 1.0 {
        return Ok(0.0);
    }
    let c = Constants::new(alpha)?;
    let d = x - 1.0;
    let quadratic = c.tail_quadratic * d * d;
    if alpha == 1.0 {
        return Ok(quadratic);
    }
    Ok(quadratic + (alpha - 1.0) * (alpha - 2.0) * c.profile_mass * iterated_tail(alpha, x)?)
}
