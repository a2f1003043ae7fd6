use serde::Serialize;

use super::tridiag::symmetric_tridiagonal_eigen;
use crate::specfun::ln_gamma;
use crate::{Error, Result};

/// Node count used for density-weighted integrals unless a caller asks for
/// more.
pub const DEFAULT_NODES: usize = 128;

/// Gauss rule for the weight `(1 − y)^a (1 + y)^b` on `[−1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiRule {
    /// Exponent `a` at `y = 1`.
    pub right_exponent: f64,
    /// Exponent `b` at `y = −1`.
    pub left_exponent: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl JacobiRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ wᵢ f(yᵢ) ≈ ∫_{−1}^{1} f(y) (1−y)^a (1+y)^b dy`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let terms: Vec<f64> = self.nodes.iter().zip(&self.weights).map(|(&y, &w)| w * f(y)).collect();
        crate::reduce::pairwise_sum(&terms)
    }

    /// Same weight carried to `[lo, hi]`: approximates
    /// `∫_lo^hi f(x) (hi − x)^a (x − lo)^b dx`.
    pub fn integrate_on<F: Fn(f64) -> f64>(&self, lo: f64, hi: f64, f: F) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let scale = half.powf(1.0 + self.right_exponent + self.left_exponent);
        scale * self.integrate(|y| f(mid + half * y))
    }
}

fn check_exponent(name: &str, e: f64) -> Result<()> {
    if !(e > -1.0) || !e.is_finite() {
        return Err(Error::domain(format!("Jacobi exponent {name} = {e} must exceed -1")));
    }
    Ok(())
}

/// `n`-point Gauss–Jacobi rule for `(1 − y)^a (1 + y)^b`.
pub fn gauss_jacobi_general(n: usize, a: f64, b: f64) -> Result<JacobiRule> {
    if n == 0 {
        return Err(Error::domain("Gauss-Jacobi rule needs at least one node"));
    }
    check_exponent("a", a)?;
    check_exponent("b", b)?;
    let ab = a + b;
    // Three-term recurrence of the monic Jacobi polynomials.
    let diag: Vec<f64> = (0..n)
        .map(|k| {
            if k == 0 {
                (b - a) / (ab + 2.0)
            } else {
                let s = 2.0 * k as f64 + ab;
                (b * b - a * a) / (s * (s + 2.0))
            }
        })
        .collect();
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let kf = k as f64;
            let s = 2.0 * kf + ab;
            let beta = if k == 1 {
                4.0 * (1.0 + a) * (1.0 + b) / (s * s * (s + 1.0))
            } else {
                4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            beta.sqrt()
        })
        .collect();
    let ln_mass = (ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0)? + ln_gamma(b + 1.0)? - ln_gamma(ab + 2.0)?;
    let mass = ln_mass.exp();
    let pairs = symmetric_tridiagonal_eigen(&diag, &off)?;
    Ok(JacobiRule {
        right_exponent: a,
        left_exponent: b,
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| mass * p.1 * p.1).collect(),
    })
}

/// Symmetric rule for `(1 − y²)^p`; nodes come in exact `±` pairs with equal
/// weights.
pub fn gauss_jacobi(n: usize, p: f64) -> Result<JacobiRule> {
    let mut rule = gauss_jacobi_general(n, p, p)?;
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        let w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        rule.weights[i] = w;
        rule.weights[j] = w;
    }
    if n % 2 == 1 {
        rule.nodes[n / 2] = 0.0;
    }
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// ∫_{−1}^{1} y^k (1 − y²)^p dy from the beta integral.
    fn even_moment(k: u32, p: f64) -> f64 {
        if k % 2 == 1 {
            return 0.0;
        }
        let h = (k as f64 + 1.0) / 2.0;
        (ln_gamma(h).unwrap() + ln_gamma(p + 1.0).unwrap() - ln_gamma(h + p + 1.0).unwrap()).exp()
    }

    #[test]
    fn legendre_small_cases() {
        let r = gauss_jacobi(1, 0.0).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert!((r.weights[0] - 2.0).abs() < 1e-15);

        let r = gauss_jacobi(2, 0.0).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((r.nodes[0] + s).abs() < 1e-15 && (r.nodes[1] - s).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-15 && (r.weights[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn second_moment_at_two_and_a_half() {
        let p = -0.75;
        let r = gauss_jacobi(20, p).unwrap();
        let oracle = (ln_gamma(1.5).unwrap() + ln_gamma(0.25).unwrap() - ln_gamma(1.75).unwrap()).exp();
        assert!((r.integrate(|y| y * y) - oracle).abs() < 1e-12 * oracle);
    }

    #[test]
    fn polynomial_exactness() {
        for p in [-0.95, -0.75, -0.5, 0.0, 0.25, 0.75, 0.95] {
            for n in [1usize, 2, 5, 16, 64] {
                let r = gauss_jacobi(n, p).unwrap();
                let mass = even_moment(0, p);
                let sum: f64 = r.weights.iter().sum();
                assert!((sum - mass).abs() < 1e-12 * mass, "p {p} n {n}");
                for k in 0..(2 * n as u32).min(24) {
                    let got = r.integrate(|y| y.powi(k as i32));
                    let want = even_moment(k, p);
                    assert!((got - want).abs() < 1e-10, "p {p} n {n} k {k}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn general_rule_moments() {
        for (a, b) in [(-0.5, 0.3), (1.5, -0.75), (0.0, 2.0)] {
            let r = gauss_jacobi_general(12, a, b).unwrap();
            let mass = ((a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0).unwrap() + ln_gamma(b + 1.0).unwrap()
                - ln_gamma(a + b + 2.0).unwrap())
            .exp();
            assert!((r.weights.iter().sum::<f64>() - mass).abs() < 1e-12 * mass);
            let first = r.integrate(|y| y);
            assert!((first - mass * (b - a) / (a + b + 2.0)).abs() < 1e-12 * mass);
        }
    }

    #[test]
    fn node_symmetry() {
        for n in [7usize, 128, 256] {
            let r = gauss_jacobi(n, -0.45).unwrap();
            for i in 0..n {
                assert_eq!(r.nodes[i], -r.nodes[n - 1 - i]);
                assert_eq!(r.weights[i], r.weights[n - 1 - i]);
                assert!(r.weights[i] > 0.0);
            }
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn refinement_self_consistency() {
        for alpha in [2.1, 2.5, 2.9] {
            let p = -(alpha - 1.0) / 2.0;
            let coarse = gauss_jacobi(32, p).unwrap().integrate(f64::cos);
            let fine = gauss_jacobi(64, p).unwrap().integrate(f64::cos);
            assert!((coarse - fine).abs() < 1e-11, "alpha {alpha}");
        }
    }

    #[test]
    fn invalid_exponent() {
        assert!(gauss_jacobi(4, -1.0).is_err());
        assert!(gauss_jacobi(0, 0.0).is_err());
    }

    #[test]
    fn mapped_interval() {
        // ∫_0^2 (2 − x)^a x^b dx = 2^{a+b+1} B(a+1, b+1)
        let (a, b) = (0.5, -0.5);
        let r = gauss_jacobi_general(8, a, b).unwrap();
        let got = r.integrate_on(0.0, 2.0, |_| 1.0);
        let want = (2f64.ln() * (a + b + 1.0) + ln_gamma(a + 1.0).unwrap() + ln_gamma(b + 1.0).unwrap()
            - ln_gamma(a + b + 2.0).unwrap())
        .exp();
        assert!((got - want).abs() < 1e-13);
    }
}
