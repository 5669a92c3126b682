//! Closed-form upper bounds on `‖Sⁿ y‖`, nonincreasing in `n`.

use crate::math;
use crate::operators::OperatorConfig;
use crate::spaces::{self, Element};

/// Upper bound on `‖Sⁿ y‖`, or `None` when no closed form is available
/// (the Laplacian).
///
/// * derivative: `‖Sⁿ‖ = 1/n!` on `H²` (attained on constants);
/// * `L_p` translation: `Sⁿy(s + na) = w^{−ns − n(n−1)a/2} y(s)`, so
///   `‖Sⁿ y‖ ≤ w^{−n(n−1)a/2} ‖y‖`;
/// * `C₀` translation: the same for the shifted part, plus the ramp created by
///   the first step, `|y(0)| · m_n · w^{−(n−1)(n−2)a/2}` with
///   `m_n = sup_{s∈[0,a]} (s/a) w^{−(n−1)s}`.
pub fn s_power_bound(op: &OperatorConfig, y: &Element, n: usize) -> Option<f64> {
    let space = op.space();
    let norm = spaces::norm(&space, y).ok()?;
    let nf = n as f64;
    match *op {
        OperatorConfig::Derivative => Some(norm / math::factorial_f64(n)),
        OperatorConfig::Laplacian => None,
        OperatorConfig::TranslationLp { w, a, .. } => {
            let a = math::rat_to_f64(a);
            Some(norm * math::exp(-nf * (nf - 1.0) * a / 2.0 * math::ln(w)))
        }
        OperatorConfig::TranslationC0 { w, a } => {
            if n == 0 {
                return Some(norm);
            }
            let a = math::rat_to_f64(a);
            let ln_w = math::ln(w);
            let shifted = norm * math::exp(-nf * (nf - 1.0) * a / 2.0 * ln_w);
            let y0 = y.as_piecewise()?.value_at_zero().abs();
            let ramp = y0 * ramp_peak(n, a, ln_w) * math::exp(-(nf - 1.0) * (nf - 2.0) * a / 2.0 * ln_w);
            Some(shifted.max(ramp))
        }
    }
}

/// `sup_{s ∈ [0,a]} (s/a) · w^{−(n−1)s}` for `n ≥ 1`.
fn ramp_peak(n: usize, a: f64, ln_w: f64) -> f64 {
    if n == 1 {
        return 1.0;
    }
    let k = (n - 1) as f64 * ln_w;
    let s_star = 1.0 / k;
    if s_star >= a {
        math::exp(-k * a)
    } else {
        s_star / a * math::exp(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::iterate;
    use crate::spaces::{ExpTerm, Piece, PiecewiseExpPoly};
    use alloc::vec;
    use num_rational::Rational64;

    #[test]
    fn c0_bound_covers_the_ramp_peak() {
        let r = Rational64::from_integer;
        let op = OperatorConfig::translation_c0(2.0, r(1)).unwrap();
        let hat = Element::Piecewise(
            PiecewiseExpPoly::new(
                2.0,
                vec![Piece::new(r(0), r(1), vec![ExpTerm::constant(1.0), ExpTerm::new(-1.0, 1, r(0))])],
            )
            .unwrap(),
        );
        for n in 1..=8 {
            let s = iterate(&op, n, &hat, true).unwrap().value;
            let actual = spaces::norm(&op.space(), &s).unwrap();
            let bound = s_power_bound(&op, &hat, n).unwrap();
            assert!(actual <= bound * (1.0 + 1e-12), "n = {n}: {actual} > {bound}");
        }
        // the naive w^{−n(n−1)a/2} bound fails at n = 3 for this element
        let s3 = iterate(&op, 3, &hat, true).unwrap().value;
        assert!(spaces::norm(&op.space(), &s3).unwrap() > 0.125);
    }

    #[test]
    fn bounds_are_nonincreasing() {
        let op = OperatorConfig::translation_c0(1.5, Rational64::new(1, 2)).unwrap();
        let y = Element::Piecewise(
            PiecewiseExpPoly::new(
                1.5,
                vec![Piece::new(
                    Rational64::from_integer(0),
                    Rational64::from_integer(1),
                    vec![ExpTerm::constant(2.0), ExpTerm::new(-2.0, 1, Rational64::from_integer(0))],
                )],
            )
            .unwrap(),
        );
        let b: vec::Vec<f64> = (0..40).map(|n| s_power_bound(&op, &y, n).unwrap()).collect();
        assert!(b.windows(2).all(|w| w[1] <= w[0]));
    }
}
