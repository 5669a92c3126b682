//! Truncated Taylor series `f(z) = Σ aₖ zᵏ` in the Hardy space `H²`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;

/// Finite coefficient vector; index `k` is the coefficient of `zᵏ`.
///
/// Canonical form has no trailing exact zeros, so the zero function is the
/// empty vector and [`TaylorCoeffs::degree`] is the index of the last stored
/// coefficient.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TaylorCoeffs {
    coeffs: Vec<Complex64>,
}

impl TaylorCoeffs {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if let Some(k) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonCanonical(format!("coefficient {k} is not finite")));
        }
        Ok(Self::from_finite(coeffs))
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub(crate) fn from_finite(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| c.re == 0.0 && c.im == 0.0) {
            coeffs.pop();
        }
        TaylorCoeffs { coeffs }
    }

    pub fn zero() -> Self {
        TaylorCoeffs { coeffs: Vec::new() }
    }

    /// `c·zᵏ`.
    pub fn monomial(k: usize, c: Complex64) -> Self {
        let mut coeffs = alloc::vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = c;
        Self::from_finite(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// `None` for the zero function.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.norm_sqr() <= tol * tol)
    }

    /// `‖f‖² = Σ |aₖ|²`, accumulated with a running scale to avoid overflow.
    pub fn norm(&self) -> f64 {
        let scale = self
            .coeffs
            .iter()
            .map(|c| c.re.abs().max(c.im.abs()))
            .fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let sum: f64 = self.coeffs.iter().map(|c| (c / scale).norm_sqr()).sum();
        scale * math::sqrt(sum)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_finite((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_finite((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self::from_finite(self.coeffs.iter().map(|c| c * alpha).collect())
    }

    /// Keeps the coefficients of `zᵏ` with `k < n`.
    pub fn truncate_below(&self, n: usize) -> Self {
        Self::from_finite(self.coeffs.iter().take(n).copied().collect())
    }

    /// `f'`: `(aₖ) ↦ ((k+1) a_{k+1})`.
    pub fn derivative(&self) -> Self {
        Self::from_finite(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    /// `∫₀ᶻ f`: `aₖ zᵏ ↦ aₖ z^{k+1}/(k+1)`.
    pub fn integral(&self) -> Self {
        if self.coeffs.is_empty() {
            return Self::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(Complex64::new(0.0, 0.0));
        out.extend(self.coeffs.iter().enumerate().map(|(k, c)| c / (k + 1) as f64));
        Self::from_finite(out)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}
