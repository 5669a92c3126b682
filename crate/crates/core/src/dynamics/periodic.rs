//! Truncated periodic vectors of the derivative.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;
use crate::spaces::TaylorCoeffs;

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicVector {
    pub period: usize,
    pub truncation: usize,
    pub lambda: Complex64,
    /// `Σ_{k=0}^{M} λᵏ zᵏ / k!`.
    pub f: TaylorCoeffs,
    /// `‖Dᴺ f − f‖`.
    pub defect: f64,
    /// `ln ‖Dᴺ f − f‖`, usable when `defect` underflows.
    pub ln_defect: f64,
}

/// Truncation of `e^{λz}` with `λ = exp(2πi·root_index/N)`, so `Dᴺ e^{λz} = e^{λz}`.
///
/// Since `λᴺ = 1`, `Dᴺ f − f = −Σ_{k=M−N+1}^{M} λᵏ zᵏ/k!` exactly and the defect
/// is evaluated from that tail in log space.
pub fn periodic_vector_derivative(period: usize, truncation: usize, root_index: usize) -> Result<PeriodicVector> {
    if period < 1 {
        return Err(Error::InvalidArgument("period must be >= 1".into()));
    }
    if truncation < period {
        return Err(Error::InvalidArgument("truncation M must be >= period N".into()));
    }
    let root = |k: usize| {
        let turn = 2.0 * core::f64::consts::PI * ((root_index * k) % period) as f64 / period as f64;
        Complex64::new(libm::cos(turn), libm::sin(turn))
    };
    let lf = math::ln_factorial_table(truncation);
    let coeffs: Vec<Complex64> = (0..=truncation).map(|k| root(k) * math::exp(-lf[k])).collect();
    let ln_defect = 0.5 * math::log_sum_exp((truncation + 1 - period..=truncation).map(|k| -2.0 * lf[k]));
    Ok(PeriodicVector {
        period,
        truncation,
        lambda: root(1),
        f: TaylorCoeffs::from_finite(coeffs),
        defect: math::exp(ln_defect),
        ln_defect,
    })
}
