use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

/// How the integrand behaves at one end of the interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    Regular,
    /// The integrand carries the factor `dist^s` (`s > −1`). The factor is
    /// applied analytically after the change of variables, so the callback
    /// returns only the remaining regular part.
    Power(f64),
    /// The callback itself behaves like `dist^s` (or like a logarithm when
    /// `s = 0`) and evaluates that factor from the supplied distance.
    Graded(f64),
}

impl Endpoint {
    fn exponent(self) -> Option<f64> {
        match self {
            Endpoint::Regular => None,
            Endpoint::Power(s) | Endpoint::Graded(s) => Some(s),
        }
    }

    /// Power `q` of the map `dist = H u^q`; chosen so the transformed
    /// integrand vanishes linearly at `u = 0`.
    fn grading(self) -> f64 {
        match self.exponent() {
            None => 1.0,
            Some(s) => (2.0 / (1.0 + s)).max(1.0),
        }
    }
}

/// Endpoint behaviour on both sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hint {
    pub left: Endpoint,
    pub right: Endpoint,
}

impl Hint {
    pub const fn none() -> Self {
        Hint {
            left: Endpoint::Regular,
            right: Endpoint::Regular,
        }
    }

    pub const fn left(e: Endpoint) -> Self {
        Hint {
            left: e,
            right: Endpoint::Regular,
        }
    }

    pub const fn right(e: Endpoint) -> Self {
        Hint {
            left: Endpoint::Regular,
            right: e,
        }
    }

    pub const fn both(left: Endpoint, right: Endpoint) -> Self {
        Hint { left, right }
    }
}

/// An evaluation point with its distances to both ends, computed without
/// cancellation near the endpoint the substitution is anchored at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abscissa {
    pub x: f64,
    pub from_lo: f64,
    pub to_hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_err: f64,
    pub evaluations: usize,
}

const MAX_SEGMENTS: usize = 4000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
    floor: f64,
}

impl Segment {
    /// Error above the rounding floor: what bisection can still remove.
    fn excess(&self) -> f64 {
        self.err - self.floor
    }
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.excess().total_cmp(&other.excess())
    }
}

/// One 15-point Kronrod evaluation with the QUADPACK error heuristic.
fn kronrod<G: Fn(f64) -> f64>(g: &G, lo: f64, hi: f64) -> (f64, f64, f64) {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = g(centre);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv = [(0.0, 0.0); 7];
    for (j, &x) in XGK.iter().take(7).enumerate() {
        let dx = half * x;
        let f1 = g(centre - dx);
        let f2 = g(centre + dx);
        fv[j] = (f1, f2);
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for (j, &(f1, f2)) in fv.iter().enumerate() {
        res_asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let round_off = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(round_off);
    }
    (value, err, round_off)
}

/// Globally adaptive bisection of `[lo, hi]` until the summed error bound
/// falls below `tol`.
fn adapt<G: Fn(f64) -> f64>(g: &G, lo: f64, hi: f64, tol: f64) -> Result<Estimate> {
    let (value, err, floor) = kronrod(g, lo, hi);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { lo, hi, value, err, floor });
    let mut total_value = value;
    let mut total_err = err;
    // Summed rounding floors of the live segments. The error estimate is
    // itself noisy at that level, so anything within twice the floor counts
    // as converged.
    let mut total_floor = floor;
    let target = |floor: f64| tol.max(2.0 * floor);
    let mut evaluations = 15;
    let mut frozen_err = 0.0;
    let mut frozen_value = 0.0;
    let mut frozen_floor = 0.0;
    loop {
        if total_err <= target(total_floor) {
            // The running sums drift; confirm against fresh ones.
            total_err = heap.iter().map(|s| s.err).sum::<f64>() + frozen_err;
            total_floor = heap.iter().map(|s| s.floor).sum::<f64>() + frozen_floor;
            if total_err <= target(total_floor) {
                break;
            }
        }
        if heap.len() >= MAX_SEGMENTS {
            return Err(Error::Accuracy {
                estimate: total_value,
                error_bound: total_err,
                tol: target(total_floor),
            });
        }
        let Some(seg) = heap.pop() else { break };
        let mid = 0.5 * (seg.lo + seg.hi);
        if !(mid > seg.lo && mid < seg.hi) {
            // Cannot split further; park the segment and count its whole
            // error as rounding.
            frozen_err += seg.err;
            frozen_value += seg.value;
            frozen_floor += seg.err;
            total_floor += seg.err - seg.floor;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let (v1, e1, f1) = kronrod(g, seg.lo, mid);
        let (v2, e2, f2) = kronrod(g, mid, seg.hi);
        evaluations += 30;
        total_value += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.err;
        total_floor += f1 + f2 - seg.floor;
        heap.push(Segment { lo: seg.lo, hi: mid, value: v1, err: e1, floor: f1 });
        heap.push(Segment { lo: mid, hi: seg.hi, value: v2, err: e2, floor: f2 });
    }
    // Re-sum from scratch to shed the drift of the running updates.
    let mut parts: Vec<(f64, f64, f64, f64)> = heap.into_iter().map(|s| (s.lo, s.value, s.err, s.floor)).collect();
    parts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let values: Vec<f64> = parts.iter().map(|p| p.1).collect();
    let value = crate::reduce::pairwise_sum(&values) + frozen_value;
    let abs_err = parts.iter().map(|p| p.2).sum::<f64>() + frozen_err;
    let tol = target(parts.iter().map(|p| p.3).sum::<f64>() + frozen_floor);
    if !value.is_finite() {
        return Err(Error::Accuracy {
            estimate: value,
            error_bound: f64::INFINITY,
            tol,
        });
    }
    if abs_err > tol {
        return Err(Error::Accuracy {
            estimate: value,
            error_bound: abs_err,
            tol,
        });
    }
    Ok(Estimate {
        value,
        abs_err,
        evaluations,
    })
}

/// Integrates over `[lo, lo + width]` after mapping `dist = width · u^q`
/// from the anchored end. `anchored_at_lo` selects which end is singular.
#[allow(clippy::too_many_arguments)]
fn graded_half<F: Fn(Abscissa) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    full_lo: f64,
    full_hi: f64,
    end: Endpoint,
    anchored_at_lo: bool,
    tol: f64,
) -> Result<Estimate> {
    let width = hi - lo;
    let full = full_hi - full_lo;
    let q = end.grading();
    let eval = |dist: f64| -> Abscissa {
        if anchored_at_lo {
            let from_lo = (lo - full_lo) + dist;
            Abscissa {
                x: lo + dist,
                from_lo,
                to_hi: full - from_lo,
            }
        } else {
            let to_hi = (full_hi - hi) + dist;
            Abscissa {
                x: hi - dist,
                from_lo: full - to_hi,
                to_hi,
            }
        }
    };
    match end {
        Endpoint::Regular => {
            let g = |u: f64| width * f(eval(width * u));
            adapt(&g, 0.0, 1.0, tol)
        }
        Endpoint::Power(s) => {
            let scale = q * width.powf(1.0 + s);
            let g = |u: f64| {
                if u <= 0.0 {
                    return 0.0;
                }
                let dist = width * u.powf(q);
                scale * u.powf(q * (1.0 + s) - 1.0) * f(eval(dist))
            };
            adapt(&g, 0.0, 1.0, tol)
        }
        Endpoint::Graded(_) => {
            let scale = q * width;
            let g = |u: f64| {
                let dist = width * u.powf(q);
                if dist <= 0.0 {
                    return 0.0;
                }
                scale * u.powf(q - 1.0) * f(eval(dist))
            };
            adapt(&g, 0.0, 1.0, tol)
        }
    }
}

/// `∫_lo^hi` of the callback times any [`Endpoint::Power`] factors declared
/// in `hint`, to absolute tolerance `tol`.
///
/// With a singular endpoint on each side the interval is split at its
/// midpoint and each half is graded towards its own singular end.
pub fn integrate_with_distances<F: Fn(Abscissa) -> f64>(f: F, lo: f64, hi: f64, tol: f64, hint: Hint) -> Result<Estimate> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::domain(format!("integration limits must be finite, got [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    for e in [hint.left, hint.right] {
        if let Some(s) = e.exponent() {
            if !(s > -1.0) {
                return Err(Error::domain(format!("endpoint exponent {s} is not integrable")));
            }
        }
    }
    if hi < lo {
        let flipped = Hint::both(hint.right, hint.left);
        let swapped = |a: Abscissa| {
            f(Abscissa {
                x: a.x,
                from_lo: a.to_hi,
                to_hi: a.from_lo,
            })
        };
        let est = integrate_forward(&swapped, hi, lo, tol, flipped)?;
        return Ok(Estimate {
            value: -est.value,
            ..est
        });
    }
    integrate_forward(&f, lo, hi, tol, hint)
}

fn integrate_forward<F: Fn(Abscissa) -> f64>(f: &F, lo: f64, hi: f64, tol: f64, hint: Hint) -> Result<Estimate> {
    if hi == lo {
        return Ok(Estimate {
            value: 0.0,
            abs_err: 0.0,
            evaluations: 0,
        });
    }
    match (hint.left, hint.right) {
        (left, Endpoint::Regular) => graded_half(f, lo, hi, lo, hi, left, true, tol),
        (Endpoint::Regular, right) => graded_half(f, lo, hi, lo, hi, right, false, tol),
        (left, right) => {
            let mid = 0.5 * (lo + hi);
            // each half still carries the far end's power weight, now regular
            let near_lo = |a: Abscissa| f(a) * far_weight(right, a.to_hi);
            let near_hi = |a: Abscissa| f(a) * far_weight(left, a.from_lo);
            let a = graded_half(&near_lo, lo, mid, lo, hi, left, true, 0.5 * tol)?;
            let b = graded_half(&near_hi, mid, hi, lo, hi, right, false, 0.5 * tol)?;
            Ok(Estimate {
                value: a.value + b.value,
                abs_err: a.abs_err + b.abs_err,
                evaluations: a.evaluations + b.evaluations,
            })
        }
    }
}

fn far_weight(end: Endpoint, dist: f64) -> f64 {
    match end {
        Endpoint::Power(s) => dist.powf(s),
        _ => 1.0,
    }
}

/// Plain-callback form of [`integrate_with_distances`].
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64, hint: Hint) -> Result<f64> {
    integrate_with_distances(|a: Abscissa| f(a.x), lo, hi, tol, hint).map(|e| e.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::ln_gamma;

    #[test]
    fn constant() {
        let v = integrate_adaptive(|_| 1.0, 0.0, 1.0, 1e-14, Hint::none()).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn both_endpoint_power_weight() {
        // ∫ (1 − y²)^{−3/4} dy = √π Γ(1/4) / Γ(3/4)
        let want = (0.5 * std::f64::consts::PI.ln() + ln_gamma(0.25).unwrap() - ln_gamma(0.75).unwrap()).exp();
        let hint = Hint::both(Endpoint::Power(-0.75), Endpoint::Power(-0.75));
        let got_split = integrate_with_distances(|_| 1.0, -1.0, 1.0, 1e-10, hint).unwrap();
        assert!((got_split.value - want).abs() < 1e-10, "{} vs {want}", got_split.value);
    }

    #[test]
    fn log_singularity() {
        let hint = Hint::left(Endpoint::Graded(0.0));
        let got = integrate_with_distances(|a| -a.from_lo.ln(), 0.0, 1.0, 1e-12, hint).unwrap();
        assert!((got.value - 1.0).abs() < 1e-12);
        // without a hint bisection still gets there
        let plain = integrate_adaptive(|y| -(y.ln()), 0.0, 1.0, 1e-10, Hint::none()).unwrap();
        assert!((plain - 1.0).abs() < 1e-10);
    }

    #[test]
    fn extreme_power_weight() {
        // ∫_0^1 x^{−0.9995} dx = 1 / 0.0005
        let got = integrate_with_distances(|_| 1.0, 0.0, 1.0, 1e-9, Hint::left(Endpoint::Power(-0.9995))).unwrap();
        assert!((got.value - 2000.0).abs() < 1e-9);
        let got = integrate_with_distances(|a| 1.0 + a.x, 0.0, 1.0, 1e-9, Hint::left(Endpoint::Power(-0.9995))).unwrap();
        // ∫ x^{s} (1 + x) = 1/(s+1) + 1/(s+2)
        let want = 1.0 / 0.0005 + 1.0 / 1.0005;
        assert!((got.value - want).abs() < 1e-8);
    }

    #[test]
    fn reversed_limits() {
        let v = integrate_adaptive(|x| x * x, 2.0, 0.0, 1e-13, Hint::none()).unwrap();
        assert!((v + 8.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn budget_failure_reports_estimate() {
        let err = integrate_adaptive(|x| (1.0 / x).sin() / x, 1e-9, 1.0, 1e-15, Hint::none()).unwrap_err();
        assert!(matches!(err, Error::Accuracy { .. }));
    }

    #[test]
    fn rejects_bad_exponent() {
        assert!(integrate_adaptive(|_| 1.0, 0.0, 1.0, 1e-8, Hint::left(Endpoint::Power(-1.0))).is_err());
    }
}
