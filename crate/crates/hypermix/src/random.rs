//! Seeded generators for elements of every dense class.

use hypermix_core::operators::OperatorConfig;
use hypermix_core::spaces::{Element, ExpTerm, NormalizedBivarPoly, Piece, PiecewiseExpPoly, TaylorCoeffs};
use hypermix_core::{Complex64, Rational64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex coefficients uniform in the unit square, degree uniform in `0..=max_degree`.
pub fn hardy<R: Rng>(rng: &mut R, max_degree: usize) -> TaylorCoeffs {
    let degree = rng.gen_range(0..=max_degree);
    let coeffs = (0..=degree)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    TaylorCoeffs::new(coeffs).expect("finite coefficients")
}

/// Like [`hardy`], rescaled to unit norm (the zero series is redrawn).
pub fn hardy_unit<R: Rng>(rng: &mut R, max_degree: usize) -> TaylorCoeffs {
    loop {
        let f = hardy(rng, max_degree);
        let n = f.norm();
        if n > 1e-3 {
            return f.scale(Complex64::new(1.0 / n, 0.0));
        }
    }
}

pub fn bivar<R: Rng>(rng: &mut R, max_index: u32, max_terms: usize) -> NormalizedBivarPoly {
    let count = rng.gen_range(1..=max_terms);
    let terms: Vec<_> = (0..count)
        .map(|_| ((rng.gen_range(0..=max_index), rng.gen_range(0..=max_index)), rng.gen_range(-1.0..1.0)))
        .collect();
    NormalizedBivarPoly::new(terms).expect("finite coefficients")
}

fn rate<R: Rng>(rng: &mut R) -> Rational64 {
    Rational64::new(rng.gen_range(-2..=2), 2)
}

fn length<R: Rng>(rng: &mut R) -> Rational64 {
    Rational64::new(rng.gen_range(1..=8), rng.gen_range(1..=4))
}

/// Up to `max_pieces` pieces with gaps, each carrying up to three terms
/// `c·sᵈ·w^{qs}` with `d ≤ 3` and `q ∈ {−1, −1/2, 0, 1/2, 1}`.
pub fn piecewise<R: Rng>(rng: &mut R, w: f64, max_pieces: usize) -> PiecewiseExpPoly {
    let count = rng.gen_range(1..=max_pieces);
    let mut lo = if rng.gen_bool(0.5) { Rational64::from_integer(0) } else { length(rng) / 2 };
    let mut pieces = Vec::with_capacity(count);
    for _ in 0..count {
        let hi = lo + length(rng);
        let terms = (0..rng.gen_range(1..=3))
            .map(|_| ExpTerm::new(rng.gen_range(-1.0..1.0), rng.gen_range(0..=3), rate(rng)))
            .collect();
        pieces.push(Piece::new(lo, hi, terms));
        lo = if rng.gen_bool(0.3) { hi + length(rng) / 4 } else { hi };
    }
    PiecewiseExpPoly::new(w, pieces).expect("valid pieces")
}

/// Continuous compactly supported elements: an optional ramp `h(1 − s/L)` at
/// the origin followed by bumps `c·s(L − s)·w^{qs}`, each vanishing at its ends.
pub fn continuous<R: Rng>(rng: &mut R, w: f64, max_bumps: usize) -> PiecewiseExpPoly {
    let zero = Rational64::from_integer(0);
    let mut pieces = Vec::new();
    let mut lo = zero;
    if rng.gen_bool(0.6) {
        let len = length(rng);
        let h: f64 = rng.gen_range(-1.0..1.0);
        let lf = *len.numer() as f64 / *len.denom() as f64;
        pieces.push(Piece::new(lo, len, vec![ExpTerm::constant(h), ExpTerm::new(-h / lf, 1, zero)]));
        lo = len;
    }
    for _ in 0..rng.gen_range(1..=max_bumps) {
        let len = length(rng);
        let lf = *len.numer() as f64 / *len.denom() as f64;
        let c: f64 = rng.gen_range(-1.0..1.0);
        let q = rate(rng);
        pieces.push(Piece::new(lo, lo + len, vec![ExpTerm::new(c * lf, 1, q), ExpTerm::new(-c, 2, q)]));
        lo += len;
    }
    PiecewiseExpPoly::new(w, pieces).expect("valid pieces")
}

/// A random element of `op`'s dense class.
pub fn element<R: Rng>(rng: &mut R, op: &OperatorConfig) -> Element {
    match *op {
        OperatorConfig::Derivative => Element::Hardy(hardy(rng, 12)),
        OperatorConfig::Laplacian => Element::Bivar(bivar(rng, 8, 6)),
        OperatorConfig::TranslationLp { w, .. } => Element::Piecewise(piecewise(rng, w, 3)),
        OperatorConfig::TranslationC0 { w, .. } => Element::Piecewise(continuous(rng, w, 3)),
    }
}

/// One operator of each family, with translation parameters drawn from small grids.
pub fn operators<R: Rng>(rng: &mut R) -> [OperatorConfig; 4] {
    let ws = [1.5, 2.0, 3.0, 4.0];
    let a = Rational64::new(rng.gen_range(1..=3), 2);
    let w = ws[rng.gen_range(0..ws.len())];
    let p = [1.0, 1.5, 2.0, 3.0][rng.gen_range(0..4)];
    [
        OperatorConfig::Derivative,
        OperatorConfig::Laplacian,
        OperatorConfig::TranslationLp { w, a, p },
        OperatorConfig::TranslationC0 { w: ws[rng.gen_range(0..ws.len())], a },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use hypermix_core::spaces::{CONTINUITY_ABS_TOL, CONTINUITY_REL_TOL};

    #[test]
    fn generators_are_deterministic_and_canonical() {
        let (mut a, mut b) = (rng(7), rng(7));
        for _ in 0..50 {
            let ops = operators(&mut a);
            assert_eq!(ops, operators(&mut b));
            for op in ops {
                let x = element(&mut a, &op);
                assert_eq!(x, element(&mut b, &op));
                op.space().check(&x).unwrap();
            }
        }
    }

    #[test]
    fn continuous_elements_are_continuous() {
        let mut r = rng(1);
        for _ in 0..100 {
            let f = continuous(&mut r, 2.0, 4);
            assert!(f.is_continuous(CONTINUITY_ABS_TOL, CONTINUITY_REL_TOL));
        }
    }

    #[test]
    fn unit_series_have_unit_norm() {
        let mut r = rng(3);
        for _ in 0..100 {
            assert!((hardy_unit(&mut r, 50).norm() - 1.0).abs() < 1e-14);
        }
    }
}
