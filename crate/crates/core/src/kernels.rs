//! Generalized kernels: `Ker Tⁿ` membership, projection onto `Ker Tⁿ`, and the
//! density of `GK(T) = ⋃ₙ Ker Tⁿ` realised by truncation.
//!
//! The projectors are basis-aligned truncations, not norm-optimal projections:
//!
//! * derivative: keep degrees `< n` (`Ker Dⁿ` is the polynomials of degree `< n`);
//! * Laplacian: keep total degree `< 2n` (each `Δ` lowers total degree by 2);
//! * translation on `L_p`: restrict to `[0, na)`;
//! * translation on `C₀`: restrict to `[0, na)` and subtract `x(na)·φ`, where `φ`
//!   is the linear ramp from 0 to 1 on `[(n−1)a, na)`, so the result stays
//!   continuous and still vanishes from `na` on.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::math;
use crate::operators::{iterate, OperatorConfig};
use crate::spaces::{self, Element, ExpTerm, Piece, PiecewiseExpPoly};
use crate::ZERO_TOLERANCE;

#[derive(Debug, Clone, PartialEq)]
pub struct KernelProjection {
    pub n: usize,
    /// Element of `Ker Tⁿ`.
    pub w_n: Element,
    /// `‖x − w_n‖`.
    pub gap: f64,
}

pub fn kernel_project(op: &OperatorConfig, x: &Element, n: usize) -> Result<KernelProjection> {
    if n < 1 {
        return Err(Error::InvalidArgument("kernel projection needs n >= 1".into()));
    }
    op.validate()?;
    let space = op.space();
    space.check(x)?;
    let w_n = project(op, x, n);
    let gap = spaces::norm(&space, &spaces::sub(x, &w_n)?)?;
    Ok(KernelProjection { n, w_n, gap })
}

/// Projection without input validation; `n = 0` yields the zero element
/// (`Ker T⁰ = {0}`).
pub(crate) fn project(op: &OperatorConfig, x: &Element, n: usize) -> Element {
    if n == 0 {
        return op.space().zero();
    }
    match (op, x) {
        (OperatorConfig::Derivative, Element::Hardy(f)) => Element::Hardy(f.truncate_below(n)),
        (OperatorConfig::Laplacian, Element::Bivar(f)) => {
            Element::Bivar(f.truncate_total_degree(2 * n as u32))
        }
        (OperatorConfig::TranslationLp { a, .. }, Element::Piecewise(f)) => {
            Element::Piecewise(f.restrict(Rational64::zero(), *a * n as i64))
        }
        (OperatorConfig::TranslationC0 { a, .. }, Element::Piecewise(f)) => {
            Element::Piecewise(continuous_cutoff(f, *a, n))
        }
        _ => unreachable!("operator/element pairing is checked on entry"),
    }
}

fn continuous_cutoff(f: &PiecewiseExpPoly, a: Rational64, n: usize) -> PiecewiseExpPoly {
    let end = a * n as i64;
    let kept = f.restrict(Rational64::zero(), end);
    let edge = f.value_at_rational(end);
    if edge == 0.0 {
        return kept;
    }
    let ramp = PiecewiseExpPoly::new(
        f.base(),
        vec![Piece::new(
            end - a,
            end,
            vec![ExpTerm::new(edge / math::rat_to_f64(a), 1, Rational64::zero())],
        )],
    )
    .expect("ramp piece is canonical");
    kept.sub(&ramp).expect("same base")
}

/// `Tⁿ f = 0` up to [`ZERO_TOLERANCE`] on coefficients.
pub fn is_in_kernel(op: &OperatorConfig, f: &Element, n: usize) -> Result<bool> {
    if n < 1 {
        return Err(Error::InvalidArgument("kernel membership needs n >= 1".into()));
    }
    Ok(iterate(op, n, f, false)?.value.is_zero(ZERO_TOLERANCE))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityRow {
    pub n: usize,
    pub gap: f64,
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    pub rows: Vec<DensityRow>,
    /// First `n` from which the gap is exactly zero through `n_max`.
    pub saturation: Option<usize>,
}

/// Kernel gaps `‖x − w_n‖` for `n = 1..=n_max`.
pub fn gk_density_table(op: &OperatorConfig, x: &Element, n_max: usize) -> Result<DensityTable> {
    if n_max < 1 {
        return Err(Error::InvalidArgument(format!("n_max = {n_max} must be >= 1")));
    }
    let rows = (1..=n_max)
        .map(|n| {
            kernel_project(op, x, n).map(|kp| DensityRow { n, gap: kp.gap, saturated: kp.gap == 0.0 })
        })
        .collect::<Result<Vec<_>>>()?;
    let saturation = rows
        .iter()
        .rposition(|r| !r.saturated)
        .map_or(Some(1), |i| (i + 1 < rows.len()).then(|| rows[i + 1].n));
    Ok(DensityTable { rows, saturation })
}

/// Index at which the truncation projector reproduces `x` exactly:
/// `deg + 1` (derivative), `⌈(totdeg + 1)/2⌉` (Laplacian), `⌈sup supp / a⌉`
/// (translations). The zero element saturates at 1.
pub fn predicted_saturation(op: &OperatorConfig, x: &Element) -> Option<usize> {
    match (op, x) {
        (OperatorConfig::Derivative, Element::Hardy(f)) => Some(f.degree().map_or(1, |d| d + 1)),
        (OperatorConfig::Laplacian, Element::Bivar(f)) => {
            Some(f.total_degree().map_or(1, |d| d as usize / 2 + 1))
        }
        (
            OperatorConfig::TranslationLp { a, .. } | OperatorConfig::TranslationC0 { a, .. },
            Element::Piecewise(f),
        ) => Some(f.support_end().map_or(1, |end| {
            let q = end / *a;
            (q.ceil().to_integer() as usize).max(1)
        })),
        _ => None,
    }
}

/// A nonzero element of `Ker T` for each family: `Tu = T0` with `u ≠ 0`.
pub fn non_injectivity_witness(op: &OperatorConfig) -> Element {
    match *op {
        OperatorConfig::Derivative => {
            Element::Hardy(spaces::TaylorCoeffs::monomial(0, num_complex::Complex64::new(1.0, 0.0)))
        }
        OperatorConfig::Laplacian => Element::Bivar(spaces::NormalizedBivarPoly::basis(1, 1, 1.0)),
        OperatorConfig::TranslationLp { w, a, .. } => Element::Piecewise(
            PiecewiseExpPoly::indicator(w, Rational64::zero(), a).expect("a > 0"),
        ),
        OperatorConfig::TranslationC0 { w, a } => {
            // tent on [0, a] peaking at a/2
            let half = a / 2;
            let slope = 2.0 / math::rat_to_f64(a);
            Element::Piecewise(
                PiecewiseExpPoly::new(
                    w,
                    vec![
                        Piece::new(Rational64::zero(), half, vec![ExpTerm::new(slope, 1, Rational64::zero())]),
                        Piece::new(
                            half,
                            a,
                            vec![ExpTerm::constant(1.0), ExpTerm::new(-slope, 1, Rational64::zero())],
                        ),
                    ],
                )
                .expect("tent is canonical"),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{NormalizedBivarPoly, TaylorCoeffs};

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    fn hardy(c: &[f64]) -> Element {
        Element::Hardy(TaylorCoeffs::from_real(c).unwrap())
    }

    fn lp21() -> OperatorConfig {
        OperatorConfig::translation_lp(2.0, r(1), 1.0).unwrap()
    }

    fn chi(lo: Rational64, hi: Rational64) -> Element {
        Element::Piecewise(PiecewiseExpPoly::indicator(2.0, lo, hi).unwrap())
    }

    #[test]
    fn derivative_projection() {
        let x = hardy(&[0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let kp = kernel_project(&OperatorConfig::Derivative, &x, 3).unwrap();
        assert_eq!(kp.w_n, hardy(&[0.0, 1.0]));
        assert_eq!(kp.gap, 1.0);
        assert!(kernel_project(&OperatorConfig::Derivative, &x, 0).is_err());
    }

    #[test]
    fn translation_projection() {
        let kp = kernel_project(&lp21(), &chi(r(0), r(3)), 2).unwrap();
        assert_eq!(kp.w_n, chi(r(0), r(2)));
        assert!((kp.gap - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kernel_elements_are_fixed() {
        let x = hardy(&[1.0, 2.0]);
        let kp = kernel_project(&OperatorConfig::Derivative, &x, 2).unwrap();
        assert_eq!((kp.w_n, kp.gap), (x, 0.0));
        let y = chi(r(0), r(2));
        let kp = kernel_project(&lp21(), &y, 2).unwrap();
        assert_eq!((kp.w_n, kp.gap), (y, 0.0));
    }

    #[test]
    fn membership_examples() {
        let d = OperatorConfig::Derivative;
        let z2 = hardy(&[0.0, 0.0, 1.0]);
        assert!(is_in_kernel(&d, &z2, 3).unwrap());
        assert!(!is_in_kernel(&d, &z2, 2).unwrap());
        assert!(is_in_kernel(&lp21(), &chi(r(0), r(2)), 2).unwrap());
    }

    #[test]
    fn density_examples() {
        let t = gk_density_table(&OperatorConfig::Derivative, &hardy(&[0.0, 0.0, 0.0, 0.0, 1.0]), 8).unwrap();
        assert_eq!(t.saturation, Some(5));
        assert!(t.rows[..4].iter().all(|r| r.gap == 1.0 && !r.saturated));

        let x = Element::Bivar(NormalizedBivarPoly::basis(3, 2, 1.0));
        let t = gk_density_table(&OperatorConfig::Laplacian, &x, 6).unwrap();
        assert_eq!(t.saturation, Some(3));
        assert_eq!(predicted_saturation(&OperatorConfig::Laplacian, &x), Some(3));

        let x = chi(r(0), Rational64::new(5, 2));
        let t = gk_density_table(&lp21(), &x, 6).unwrap();
        assert_eq!(t.saturation, Some(3));
        assert!((t.rows[1].gap - 0.5).abs() < 1e-15);
    }

    #[test]
    fn c0_cutoff_is_continuous_and_in_kernel() {
        let op = OperatorConfig::translation_c0(2.0, r(1)).unwrap();
        // 3 − t on [0,3)
        let x = Element::Piecewise(
            PiecewiseExpPoly::new(
                2.0,
                vec![Piece::new(r(0), r(3), vec![ExpTerm::constant(3.0), ExpTerm::new(-1.0, 1, r(0))])],
            )
            .unwrap(),
        );
        for n in 1..=4 {
            let kp = kernel_project(&op, &x, n).unwrap();
            let w = kp.w_n.as_piecewise().unwrap();
            assert!(w.is_continuous(1e-12, 1e-9), "n = {n}");
            assert!(is_in_kernel(&op, &kp.w_n, n).unwrap());
            let expect = (3.0 - n as f64).max(0.0);
            assert!((kp.gap - expect).abs() < 1e-12, "n = {n}: {}", kp.gap);
        }
    }

    #[test]
    fn non_injectivity() {
        for op in [
            OperatorConfig::Derivative,
            OperatorConfig::Laplacian,
            lp21(),
            OperatorConfig::translation_c0(3.0, Rational64::new(1, 2)).unwrap(),
        ] {
            let u = non_injectivity_witness(&op);
            assert!(!u.is_zero(0.0));
            assert!(crate::operators::apply_t(&op, &u).unwrap().is_zero(0.0));
        }
    }
}
