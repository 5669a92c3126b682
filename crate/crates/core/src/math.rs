//! Scalar helpers over `libm` (the core has no `std` float methods).

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::ToPrimitive;

pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

pub(crate) fn powi(x: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    let mut base = x;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

pub(crate) fn rat_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `n!` as the correctly rounded `f64` of the exact integer.
pub(crate) fn factorial_f64(n: usize) -> f64 {
    if n <= 20 {
        (1..=n as u64).product::<u64>() as f64
    } else if n > 170 {
        f64::INFINITY
    } else {
        let mut acc = BigUint::from(1u32);
        for k in 2..=n as u32 {
            acc *= k;
        }
        acc.to_f64().unwrap_or(f64::INFINITY)
    }
}

/// `ln n!`: exact-integer route up to 20, summed logarithms above.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    if n <= 20 {
        ln(factorial_f64(n))
    } else {
        let mut acc = ln(factorial_f64(20));
        for k in 21..=n {
            acc += ln(k as f64);
        }
        acc
    }
}

/// Table of `ln k!` for `k = 0..=n`.
pub(crate) fn ln_factorial_table(n: usize) -> alloc::vec::Vec<f64> {
    let mut out = alloc::vec::Vec::with_capacity(n + 1);
    for k in 0..=n.min(20) {
        out.push(ln(factorial_f64(k)));
    }
    for k in 21..=n {
        let prev = out[k - 1];
        out.push(prev + ln(k as f64));
    }
    out
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    libm::round(acc)
}

/// `ln Σ exp(xᵢ)` ignoring `-inf` entries.
pub(crate) fn log_sum_exp(xs: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = xs.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = xs.into_iter().map(|x| exp(x - max)).sum();
    max + ln(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials_agree_across_routes() {
        assert_eq!(factorial_f64(5), 120.0);
        assert_eq!(factorial_f64(20), 2_432_902_008_176_640_000.0);
        let table = ln_factorial_table(40);
        for (k, v) in table.iter().enumerate() {
            assert!((v - ln_factorial(k)).abs() < 1e-12 * v.max(1.0));
            assert!((v - ln(factorial_f64(k))).abs() < 1e-12 * v.max(1.0));
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(10, 0), 1.0);
        assert_eq!(binomial(3, 4), 0.0);
    }

    #[test]
    fn powi_matches_repeated_product() {
        assert_eq!(powi(1.5, 0), 1.0);
        assert_eq!(powi(2.0, 10), 1024.0);
    }
}
