//! Polynomials on the unit square in the normalized basis `Xₙ Y_l = xⁿ yˡ / (n! l!)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Sparse map `(n, l) → c_{n,l}` representing `Σ c_{n,l} Xₙ Y_l`.
///
/// No zero coefficient is ever stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NormalizedBivarPoly {
    terms: BTreeMap<(u32, u32), f64>,
}

impl NormalizedBivarPoly {
    pub fn new(terms: impl IntoIterator<Item = ((u32, u32), f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for ((n, l), c) in terms {
            if !c.is_finite() {
                return Err(Error::NonCanonical(format!("coefficient of X{n}Y{l} is not finite")));
            }
            *map.entry((n, l)).or_insert(0.0) += c;
        }
        map.retain(|_, c| *c != 0.0);
        Ok(NormalizedBivarPoly { terms: map })
    }

    pub(crate) fn from_map(mut terms: BTreeMap<(u32, u32), f64>) -> Self {
        terms.retain(|_, c| *c != 0.0);
        NormalizedBivarPoly { terms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `c · Xₙ Y_l`.
    pub fn basis(n: u32, l: u32, c: f64) -> Self {
        Self::from_map(BTreeMap::from([((n, l), c)]))
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    pub fn coeff(&self, n: u32, l: u32) -> f64 {
        self.terms.get(&(n, l)).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `n + l` among stored terms.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(n, l)| n + l).max()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.abs() <= tol)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.terms.clone();
        for (k, c) in &other.terms {
            *out.entry(*k).or_insert(0.0) += c;
        }
        Self::from_map(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self::from_map(self.terms.iter().map(|(k, c)| (*k, c * alpha)).collect())
    }

    /// Keeps the terms with `n + l < bound`.
    pub fn truncate_total_degree(&self, bound: u32) -> Self {
        Self::from_map(
            self.terms
                .iter()
                .filter(|((n, l), _)| n + l < bound)
                .map(|(k, c)| (*k, *c))
                .collect(),
        )
    }

    /// Coefficient of the raw monomial `xⁿ yˡ`, i.e. `c_{n,l} / (n! l!)`.
    pub fn monomial_coeff(&self, n: u32, l: u32) -> f64 {
        let c = self.coeff(n, l);
        if n + l <= 40 {
            c / (math::factorial_f64(n as usize) * math::factorial_f64(l as usize))
        } else {
            c * math::exp(-math::ln_factorial(n as usize) - math::ln_factorial(l as usize))
        }
    }

    /// `L²((0,1)²)` norm through the exact Gram matrix
    /// `G[(n,l),(m,k)] = 1/(n! m! (n+m+1)) · 1/(l! k! (l+k+1))`.
    ///
    /// Each basis element carries its own `1/(n! l!)` factor; those are pulled
    /// out in log space relative to the largest one, so high degrees neither
    /// overflow nor underflow the quadratic form.
    pub fn norm(&self) -> f64 {
        if self.terms.is_empty() {
            return 0.0;
        }
        let keys: Vec<(u32, u32)> = self.terms.keys().copied().collect();
        let coeffs: Vec<f64> = self.terms.values().copied().collect();
        let max_index = keys.iter().map(|(n, l)| (*n).max(*l)).max().unwrap_or(0) as usize;

        let small = max_index <= 20;
        let lf = math::ln_factorial_table(max_index);
        // log of 1/(n! l!) per basis element; `anchor` is the largest.
        let logs: Vec<f64> = keys.iter().map(|(n, l)| -(lf[*n as usize] + lf[*l as usize])).collect();
        let anchor = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = if small {
            keys.iter()
                .map(|(n, l)| {
                    1.0 / (math::factorial_f64(*n as usize) * math::factorial_f64(*l as usize))
                })
                .collect()
        } else {
            logs.iter().map(|g| math::exp(g - anchor)).collect()
        };

        let mut sum = 0.0;
        for i in 0..keys.len() {
            let (ni, li) = keys[i];
            let vi = coeffs[i] * weights[i];
            if vi == 0.0 {
                continue;
            }
            for j in 0..keys.len() {
                let (nj, lj) = keys[j];
                let vj = coeffs[j] * weights[j];
                sum += vi * vj / (((ni + nj + 1) as f64) * ((li + lj + 1) as f64));
            }
        }
        let root = math::sqrt(sum.max(0.0));
        if small {
            root
        } else {
            root * math::exp(anchor)
        }
    }

    /// `Δ(Xₙ Y_l) = X_{n−2} Y_l + Xₙ Y_{l−2}`, negative indices dropped.
    pub fn laplacian(&self) -> Self {
        let mut out = BTreeMap::new();
        for (&(n, l), &c) in &self.terms {
            if n >= 2 {
                *out.entry((n - 2, l)).or_insert(0.0) += c;
            }
            if l >= 2 {
                *out.entry((n, l - 2)).or_insert(0.0) += c;
            }
        }
        Self::from_map(out)
    }

    /// `Δ⁻¹(Xₙ Y_l) = Σ_{j=0}^{⌊n/2⌋} (−1)ʲ X_{n−2j} Y_{l+2j+2}`, extended linearly.
    pub fn laplacian_inverse(&self) -> Self {
        let mut out = BTreeMap::new();
        for (&(n, l), &c) in &self.terms {
            for j in 0..=n / 2 {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                *out.entry((n - 2 * j, l + 2 * j + 2)).or_insert(0.0) += sign * c;
            }
        }
        Self::from_map(out)
    }

    pub fn is_finite(&self) -> bool {
        self.terms.values().all(|c| c.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_norms() {
        assert_eq!(NormalizedBivarPoly::basis(0, 0, 1.0).norm(), 1.0);
        let x = NormalizedBivarPoly::basis(1, 0, 1.0);
        assert!((x.norm() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn laplacian_examples() {
        let f = NormalizedBivarPoly::basis(2, 2, 1.0);
        let expect = NormalizedBivarPoly::new([((0, 2), 1.0), ((2, 0), 1.0)]).unwrap();
        assert_eq!(f.laplacian(), expect);

        let one = NormalizedBivarPoly::basis(0, 0, 1.0);
        assert_eq!(one.laplacian_inverse(), NormalizedBivarPoly::basis(0, 2, 1.0));

        let x2 = NormalizedBivarPoly::basis(2, 0, 1.0);
        let expect = NormalizedBivarPoly::new([((2, 2), 1.0), ((0, 4), -1.0)]).unwrap();
        assert_eq!(x2.laplacian_inverse(), expect);
    }

    #[test]
    fn harmonic_xy_is_annihilated() {
        assert!(NormalizedBivarPoly::basis(1, 1, 1.0).laplacian().is_empty());
    }

    #[test]
    fn y_squared_over_two_norm() {
        // ∬ (y²/2)² = 1/20
        let y2 = NormalizedBivarPoly::basis(0, 2, 1.0);
        assert!((y2.norm() - (1.0f64 / 20.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn log_space_norm_matches_direct_route_at_the_threshold() {
        // degree 21 forces the log-space branch; compare against the closed form
        // for a single basis element: ‖X_n Y_l‖² = 1/(n!²(2n+1)) · 1/(l!²(2l+1)).
        let f = NormalizedBivarPoly::basis(21, 3, 1.0);
        let expect = (-2.0 * (math::ln_factorial(21) + math::ln_factorial(3))).exp()
            / (43.0 * 7.0);
        assert!((f.norm() / expect.sqrt() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monomial_conversion() {
        let f = NormalizedBivarPoly::basis(2, 3, 12.0);
        assert_eq!(f.monomial_coeff(2, 3), 1.0);
    }
}
