//! Adaptive Gauss–Legendre quadrature on a finite interval.

use alloc::vec::Vec;

const ORDER: usize = 10;
const MAX_DEPTH: u32 = 40;

/// Fixed Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are the roots of `P_n`, found by Newton iteration from the
    /// Chebyshev-like initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        GaussLegendre { nodes, weights }
    }

    pub fn integrate(&self, f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// `(P_n(x), P_n'(x))` via the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates `f` over `[a, b]` by interval halving until the one-panel and
/// two-panel estimates agree within `abs_tol` (split between halves) or
/// `rel_tol` of the estimate.
pub fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    if a.is_nan() || b.is_nan() || b <= a {
        return 0.0;
    }
    let rule = GaussLegendre::new(ORDER);
    let whole = rule.integrate(f, a, b);
    recurse(&rule, f, a, b, whole, abs_tol, rel_tol, 0)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    rule: &GaussLegendre,
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    abs_tol: f64,
    rel_tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let left = rule.integrate(f, a, m);
    let right = rule.integrate(f, m, b);
    let both = left + right;
    let err = (both - whole).abs();
    if err <= abs_tol || err <= rel_tol * both.abs() || depth >= MAX_DEPTH || m <= a || m >= b {
        return both;
    }
    recurse(rule, f, a, m, left, 0.5 * abs_tol, rel_tol, depth + 1)
        + recurse(rule, f, m, b, right, 0.5 * abs_tol, rel_tol, depth + 1)
}

/// `∫₀ᴸ e^{κ s} ds`, stable for small `κ L`.
pub(crate) fn exp_integral(kappa: f64, len: f64) -> f64 {
    if kappa == 0.0 {
        len
    } else {
        libm::expm1(kappa * len) / kappa
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_low_degree_polynomials() {
        let rule = GaussLegendre::new(ORDER);
        // degree 2n-1 = 19 is integrated exactly
        let v = rule.integrate(&|x: f64| x.powi(18), 0.0, 1.0);
        assert!((v - 1.0 / 19.0).abs() < 1e-14);
        let w: f64 = rule.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_kinks() {
        let v = adaptive(&|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-12, 0.0);
        assert!((v - (0.045 + 0.245)).abs() < 1e-10);
    }

    #[test]
    fn adaptive_exponential() {
        let v = adaptive(&|x: f64| (-12.0 * x).exp(), 0.0, 3.0, 1e-12, 1e-14);
        assert!((v - (1.0 - (-36.0f64).exp()) / 12.0).abs() < 1e-13);
        assert!((exp_integral(-12.0, 3.0) - v).abs() < 1e-13);
    }
}
