//! The profile identities: singular integrals of `|x − y|^e` (odd or even)
//! against `ω(y) = (1 − y²)^{−(α−1)/2}` and their closed forms.
//!
//! Both sides are computed here without touching `closedform`. The left side
//! is a direct quadrature; the right side uses gamma-function constants and
//! remainder integrals written in the original `y` variable.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::quadrature::{integrate_with_distances, Abscissa, Endpoint, Hint};
use crate::reduce::par_rows;
use crate::specfun::{gamma, ln_gamma};
use crate::{Error, Result};

const QUAD_TOL: f64 = 1e-12;
const SQRT_PI: f64 = 1.772_453_850_905_516;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum IdentityId {
    #[serde(rename = "INT")]
    Int,
    #[serde(rename = "INT1")]
    Int1,
    #[serde(rename = "INT2")]
    Int2,
    #[serde(rename = "INT3")]
    Int3,
    #[serde(rename = "INT1A")]
    Int1a,
    #[serde(rename = "INT2A")]
    Int2a,
    #[serde(rename = "INT3A")]
    Int3a,
    #[serde(rename = "COMPINT")]
    Compint,
}

impl IdentityId {
    pub const ALL: [IdentityId; 8] = [
        IdentityId::Int,
        IdentityId::Int1,
        IdentityId::Int2,
        IdentityId::Int3,
        IdentityId::Int1a,
        IdentityId::Int2a,
        IdentityId::Int3a,
        IdentityId::Compint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::Int => "INT",
            IdentityId::Int1 => "INT1",
            IdentityId::Int2 => "INT2",
            IdentityId::Int3 => "INT3",
            IdentityId::Int1a => "INT1A",
            IdentityId::Int2a => "INT2A",
            IdentityId::Int3a => "INT3A",
            IdentityId::Compint => "COMPINT",
        }
    }

    /// Open interval of admissible `α`.
    pub fn alpha_range(self) -> (f64, f64) {
        match self {
            IdentityId::Int | IdentityId::Compint => (2.0, 3.0),
            IdentityId::Int1 | IdentityId::Int2 | IdentityId::Int3 => (1.0, 3.0),
            IdentityId::Int1a => (1.0, 2.0),
            IdentityId::Int2a => (0.0, 2.0),
            IdentityId::Int3a => (-1.0, 2.0),
        }
    }

    pub fn admits(self, alpha: f64) -> bool {
        let (lo, hi) = self.alpha_range();
        alpha > lo && alpha < hi
    }

    /// Exponent `e` of the kernel `|x − y|^e` as a shift of `α`, and whether
    /// the kernel carries `sgn(x − y)`.
    fn kernel_shape(self) -> (f64, bool) {
        match self {
            IdentityId::Int => (-3.0, true),
            IdentityId::Int1 | IdentityId::Int1a => (-2.0, false),
            IdentityId::Int2 | IdentityId::Int2a => (-1.0, true),
            IdentityId::Int3 | IdentityId::Int3a | IdentityId::Compint => (0.0, false),
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::domain(format!("unknown identity {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity: IdentityId,
    pub alpha: f64,
    pub xs: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub max_abs_err: f64,
    /// `max |lhs − rhs| / max(|rhs|, 1)`.
    pub max_rel_err: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Gamma-function constants of the unit profile, evaluated independently
/// of `closedform`.
struct ProfileConstants {
    mass: f64,
    moment: f64,
    inner: f64,
    outer: f64,
    quad: f64,
}

impl ProfileConstants {
    fn new(alpha: f64) -> Result<Self> {
        let half = |v: f64| v / 2.0;
        let mass = SQRT_PI * (ln_gamma(half(3.0 - alpha))? - ln_gamma(half(4.0 - alpha))?).exp();
        // Beta((α+1)/2, (3−α)/2) with Γ(2) = 1
        let moment = (ln_gamma(half(alpha + 1.0))? + ln_gamma(half(3.0 - alpha))?).exp();
        let inner = if alpha == 1.0 { f64::NAN } else { 2.0 * moment / (alpha - 1.0) };
        let shared = mass * gamma(half(4.0 - alpha))? / SQRT_PI;
        let outer = if alpha == 1.0 { f64::NAN } else { -shared * gamma(half(alpha - 1.0))? };
        let quad = shared * gamma(half(alpha + 1.0))?;
        Ok(ProfileConstants { mass, moment, inner, outer, quad })
    }
}

fn check(id: IdentityId, alpha: f64) -> Result<()> {
    if id.admits(alpha) {
        Ok(())
    } else {
        let (lo, hi) = id.alpha_range();
        Err(Error::domain(format!("{id} needs {lo} < alpha < {hi}, got {alpha}")))
    }
}

/// `∫_{−1}^{1} [sgn(x−y)] |x−y|^e ω(y) dy` by quadrature, split at `x`.
pub fn identity_lhs(id: IdentityId, alpha: f64, x: f64) -> Result<f64> {
    check(id, alpha)?;
    if !x.is_finite() {
        return Err(Error::domain("sample point must be finite"));
    }
    let p = -(alpha - 1.0) / 2.0;
    let (shift, odd) = id.kernel_shape();
    let e = alpha + shift;
    let edge = Endpoint::Power(p);
    let near = Endpoint::Power(e);
    if x.abs() < 1.0 {
        let left = integrate_with_distances(
            |a: Abscissa| ((1.0 - x) + a.to_hi).powf(p),
            -1.0,
            x,
            QUAD_TOL,
            Hint::both(edge, near),
        )?;
        let right = integrate_with_distances(
            |a: Abscissa| ((1.0 + x) + a.from_lo).powf(p),
            x,
            1.0,
            QUAD_TOL,
            Hint::both(near, edge),
        )?;
        let sign = if odd { -1.0 } else { 1.0 };
        return Ok(left.value + sign * right.value);
    }
    if x.abs() == 1.0 {
        // the kernel and the profile share an endpoint
        let q = p + e;
        if q <= -1.0 {
            return Err(Error::domain(format!("{id} diverges at x = {x}")));
        }
        let value = if x > 0.0 {
            integrate_with_distances(|_: Abscissa| 1.0, -1.0, 1.0, QUAD_TOL, Hint::both(edge, Endpoint::Power(q)))?
        } else {
            integrate_with_distances(|_: Abscissa| 1.0, -1.0, 1.0, QUAD_TOL, Hint::both(Endpoint::Power(q), edge))?
        };
        let sign = if odd { x.signum() } else { 1.0 };
        return Ok(sign * value.value);
    }
    let value = integrate_with_distances(
        |a: Abscissa| {
            let d = if x > 1.0 { (x - 1.0) + a.to_hi } else { (-1.0 - x) + a.from_lo };
            d.powf(e)
        },
        -1.0,
        1.0,
        QUAD_TOL,
        Hint::both(edge, edge),
    )?;
    let sign = if odd { x.signum() } else { 1.0 };
    Ok(sign * value.value)
}

/// `∫_1^X (z²−1)^{−s} g(z) dz` with `s = (3−α)/2` and the factor
/// `(z − 1)^{extra}` pulled into the endpoint weight.
fn outward(alpha: f64, top: f64, extra: f64, g: impl Fn(f64) -> f64) -> Result<f64> {
    let s = (3.0 - alpha) / 2.0;
    let tol = QUAD_TOL * top.powi(2);
    Ok(integrate_with_distances(
        |a: Abscissa| (2.0 + a.from_lo).powf(-s) * g(1.0 + a.from_lo),
        1.0,
        top,
        tol,
        Hint::left(Endpoint::Power(extra - s)),
    )?
    .value)
}

/// `∫_X^∞ (z²−1)^{−s} dz = X ∫_0^1 v^{1−α} (X² − v²)^{−s} dv` (`z = X/v`).
fn upper_tail(alpha: f64, top: f64) -> Result<f64> {
    let s = (3.0 - alpha) / 2.0;
    let value = integrate_with_distances(
        |a: Abscissa| (top * top - a.x * a.x).powf(-s),
        0.0,
        1.0,
        QUAD_TOL,
        Hint::left(Endpoint::Power(1.0 - alpha)),
    )?;
    Ok(top * value.value)
}

/// The closed-form side of the identity.
pub fn identity_rhs(id: IdentityId, alpha: f64, x: f64) -> Result<f64> {
    check(id, alpha)?;
    if !x.is_finite() {
        return Err(Error::domain("sample point must be finite"));
    }
    let k = ProfileConstants::new(alpha)?;
    let a = alpha;
    let top = x.abs();
    let sg = x.signum();
    let outside = top > 1.0;
    Ok(match id {
        IdentityId::Int => {
            if outside {
                k.mass * sg * (x * x - 1.0).powf(-(3.0 - a) / 2.0)
            } else {
                0.0
            }
        }
        IdentityId::Int1 => {
            let tail = if outside { (a - 2.0) * k.mass * outward(a, top, 0.0, |_| 1.0)? } else { 0.0 };
            k.inner + tail
        }
        IdentityId::Int2 => {
            let tail = if outside {
                (a - 1.0) * (a - 2.0) * k.mass * sg * outward(a, top, 0.0, |z| top - z)?
            } else {
                0.0
            };
            (a - 1.0) * k.inner * x + tail
        }
        IdentityId::Int3 | IdentityId::Compint => {
            let tail = if outside {
                a * (a - 1.0) * (a - 2.0) / 2.0 * k.mass * outward(a, top, 0.0, |z| (top - z).powi(2))?
            } else {
                0.0
            };
            let lead = if id == IdentityId::Int3 { a * (a - 1.0) / 2.0 * k.inner } else { a * k.moment };
            lead * x * x + k.moment + tail
        }
        IdentityId::Int1a => {
            let tail = if outside { k.outer - (a - 2.0) * k.mass * upper_tail(a, top)? } else { 0.0 };
            k.inner + tail
        }
        IdentityId::Int2a => {
            // (α−1)c = 2C′ and (α−1)c⁽¹⁾ = −2D keep α = 1 finite
            let tail = if outside {
                // ∫_1^X T(z) dz = ∫_1^X h(w)(w−1) dw + (X−1) T(X)
                let integrated = outward(a, top, 1.0, |_| 1.0)? + (top - 1.0) * upper_tail(a, top)?;
                -2.0 * k.quad * sg * (top - 1.0) - (a - 1.0) * (a - 2.0) * k.mass * sg * integrated
            } else {
                0.0
            };
            2.0 * k.moment * x + tail
        }
        IdentityId::Int3a => {
            let tail = if outside {
                // ∫_1^X (X−z) T(z) dz = ½∫_1^X h(w)(w−1)(2X−1−w) dw + ½(X−1)² T(X)
                let iterated =
                    0.5 * outward(a, top, 1.0, |w| 2.0 * top - 1.0 - w)? + 0.5 * (top - 1.0).powi(2) * upper_tail(a, top)?;
                -a * k.quad * (top - 1.0).powi(2) - a * (a - 1.0) * (a - 2.0) * k.mass * iterated
            } else {
                0.0
            };
            a * k.moment * x * x + k.moment + tail
        }
    })
}

/// Compares both sides of an identity at every sample point.
pub fn verify_identity(id: IdentityId, alpha: f64, xs: &[f64], tol: f64) -> Result<IdentityReport> {
    check(id, alpha)?;
    if xs.is_empty() {
        return Err(Error::domain("no sample points"));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let sides = par_rows(xs.len(), |i| -> Result<(f64, f64)> { Ok((identity_lhs(id, alpha, xs[i])?, identity_rhs(id, alpha, xs[i])?)) });
    let sides = sides.into_iter().collect::<Result<Vec<_>>>()?;
    let (lhs, rhs): (Vec<f64>, Vec<f64>) = sides.into_iter().unzip();
    let mut max_abs_err: f64 = 0.0;
    let mut max_rel_err: f64 = 0.0;
    for (l, r) in lhs.iter().zip(&rhs) {
        let d = (l - r).abs();
        max_abs_err = max_abs_err.max(d);
        max_rel_err = max_rel_err.max(d / r.abs().max(1.0));
    }
    Ok(IdentityReport {
        identity: id,
        alpha,
        xs: xs.to_vec(),
        lhs,
        rhs,
        max_abs_err,
        max_rel_err,
        tol,
        pass: max_rel_err <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const INTERIOR: [f64; 3] = [0.5, -0.3, 0.85];
    const EXTERIOR: [f64; 3] = [1.5, -2.0, 3.0];

    fn alphas(id: IdentityId) -> [f64; 3] {
        match id {
            IdentityId::Int | IdentityId::Compint => [2.1, 2.5, 2.9],
            IdentityId::Int1 | IdentityId::Int2 | IdentityId::Int3 => [1.25, 2.5, 2.9],
            IdentityId::Int1a => [1.2, 1.5, 1.8],
            IdentityId::Int2a => [0.3, 1.0, 1.7],
            IdentityId::Int3a => [-0.5, 0.5, 1.5],
        }
    }

    #[test]
    fn every_identity_inside_and_outside() {
        for id in IdentityId::ALL {
            for alpha in alphas(id) {
                for xs in [INTERIOR, EXTERIOR] {
                    let r = verify_identity(id, alpha, &xs, 1e-6).unwrap();
                    assert!(r.pass && r.max_rel_err < 1e-9, "{id} alpha={alpha}: {r:?}");
                }
            }
        }
    }

    #[test]
    fn compint_at_origin_is_power_moment() {
        // ∫|y|^α ω = Γ((α+1)/2) Γ((3−α)/2) = t/sin t
        for alpha in [2.2, 2.5, 2.8] {
            let t = (alpha - 1.0) * std::f64::consts::FRAC_PI_2;
            let lhs = identity_lhs(IdentityId::Compint, alpha, 0.0).unwrap();
            assert!((lhs - t / t.sin()).abs() < 1e-11, "{alpha}");
            assert!((identity_rhs(IdentityId::Compint, alpha, 0.0).unwrap() - t / t.sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn odd_kernel_cancels_inside() {
        assert!(identity_lhs(IdentityId::Int, 2.5, 0.5).unwrap().abs() < 1e-10);
        assert_eq!(identity_rhs(IdentityId::Int, 2.5, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn int2_interior_value() {
        let alpha: f64 = 2.7;
        let t = (alpha - 1.0) * std::f64::consts::FRAC_PI_2;
        let expect = (alpha - 1.0) * std::f64::consts::PI / t.sin() * 0.3;
        // brute force: Gauss–Jacobi with the profile as weight; the kink at
        // y = 0.3 only slows convergence, so compare two rule sizes
        let brute = |n: usize| {
            let rule = crate::quadrature::gauss_jacobi(n, -(alpha - 1.0) / 2.0).unwrap();
            rule.integrate(|y| {
                let d: f64 = 0.3 - y;
                d.signum() * d.abs().powf(alpha - 1.0)
            })
        };
        let (coarse, fine) = (brute(800), brute(1600));
        assert!((coarse - fine).abs() < 1e-6);
        assert!((fine - expect).abs() < 1e-6, "{fine} {expect}");
        let lhs = identity_lhs(IdentityId::Int2, alpha, 0.3).unwrap();
        assert!((lhs - expect).abs() < 1e-10, "{lhs} {expect}");
    }

    #[test]
    fn finite_differences_walk_down_the_chain() {
        // d/dx of the |·|^e integral is e times the odd |·|^{e−1} integral
        let h = 1e-4;
        let d = |id, alpha, x: f64| (identity_rhs(id, alpha, x + h).unwrap() - identity_rhs(id, alpha, x - h).unwrap()) / (2.0 * h);
        for alpha in [2.3, 2.7] {
            for x in [0.4, 1.6, -2.5] {
                let steps = [
                    (IdentityId::Int3, IdentityId::Int2, alpha),
                    (IdentityId::Int2, IdentityId::Int1, alpha - 1.0),
                    (IdentityId::Int1, IdentityId::Int, alpha - 2.0),
                ];
                for (upper, lower, factor) in steps {
                    let want = factor * identity_rhs(lower, alpha, x).unwrap();
                    let got = d(upper, alpha, x);
                    assert!((got - want).abs() < 1e-6 * want.abs().max(1.0), "{upper}->{lower} {alpha} {x}: {got} {want}");
                }
            }
        }
        for alpha in [0.5, 1.5] {
            for x in [1.7, -2.2] {
                let want = alpha * identity_rhs(IdentityId::Int2a, alpha, x).unwrap();
                let got = d(IdentityId::Int3a, alpha, x);
                assert!((got - want).abs() < 1e-6 * want.abs().max(1.0), "{alpha} {x}");
            }
        }
    }

    #[test]
    fn range_and_parsing() {
        assert!(verify_identity(IdentityId::Int1a, 2.5, &[0.0], 1e-6).is_err());
        assert!(verify_identity(IdentityId::Int, 1.5, &[0.0], 1e-6).is_err());
        assert!(verify_identity(IdentityId::Compint, 2.5, &[], 1e-6).is_err());
        assert_eq!("int3a".parse::<IdentityId>().unwrap(), IdentityId::Int3a);
        assert!("INT4".parse::<IdentityId>().is_err());
        assert_eq!(serde_json::to_value(IdentityId::Compint).unwrap(), "COMPINT");
    }

    #[test]
    fn edge_of_the_support() {
        // |x−y|^α against ω stays integrable at x = 1; the odd α−3 kernel does not
        for x in [1.0, -1.0] {
            let r = verify_identity(IdentityId::Compint, 2.5, &[x], 1e-6).unwrap();
            assert!(r.pass, "{r:?}");
        }
        assert!(identity_lhs(IdentityId::Int, 2.5, 1.0).is_err());
    }
}
