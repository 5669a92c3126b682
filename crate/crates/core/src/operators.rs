//! The four operator families `T`, their right inverses `S`, and powers.
//!
//! | family          | `T`                      | `S`                                         |
//! |-----------------|--------------------------|---------------------------------------------|
//! | derivative      | `f ↦ f'`                 | `f ↦ ∫₀ᶻ f`                                 |
//! | Laplacian       | `f ↦ f_xx + f_yy`        | `Xₙ Y_l ↦ Σ_j (−1)ʲ X_{n−2j} Y_{l+2j+2}`     |
//! | translation L_p | `f ↦ wᵗ f(t+a)`          | `f ↦ w^{−(t−a)} f(t−a)` on `t > a`, else 0  |
//! | translation C₀  | `f ↦ wᵗ f(t+a)`          | as above, plus the ramp `f(0) t / a` on `[0,a)` |

use alloc::format;
use alloc::vec;

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::math;
use crate::spaces::{Element, ExpTerm, Piece, PiecewiseExpPoly, Space};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorConfig {
    Derivative,
    Laplacian,
    TranslationLp { w: f64, a: Rational64, p: f64 },
    TranslationC0 { w: f64, a: Rational64 },
}

impl OperatorConfig {
    pub fn translation_lp(w: f64, a: Rational64, p: f64) -> Result<Self> {
        let op = OperatorConfig::TranslationLp { w, a, p };
        op.validate()?;
        Ok(op)
    }

    pub fn translation_c0(w: f64, a: Rational64) -> Result<Self> {
        let op = OperatorConfig::TranslationC0 { w, a };
        op.validate()?;
        Ok(op)
    }

    pub fn validate(&self) -> Result<()> {
        let (w, a) = match *self {
            OperatorConfig::Derivative | OperatorConfig::Laplacian => return Ok(()),
            OperatorConfig::TranslationLp { w, a, p } => {
                if !(p.is_finite() && p >= 1.0) {
                    return Err(Error::InvalidParameter(format!("p = {p} must be >= 1")));
                }
                (w, a)
            }
            OperatorConfig::TranslationC0 { w, a } => (w, a),
        };
        if !(w.is_finite() && w > 1.0) {
            return Err(Error::InvalidParameter(format!("w = {w} must be > 1")));
        }
        if !a.is_positive() {
            return Err(Error::InvalidParameter(format!("a = {a} must be > 0")));
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            OperatorConfig::Derivative => "derivative",
            OperatorConfig::Laplacian => "laplacian",
            OperatorConfig::TranslationLp { .. } => "translation-lp",
            OperatorConfig::TranslationC0 { .. } => "translation-c0",
        }
    }

    pub fn space(&self) -> Space {
        match *self {
            OperatorConfig::Derivative => Space::Hardy,
            OperatorConfig::Laplacian => Space::BivarPoly,
            OperatorConfig::TranslationLp { w, a, p } => Space::TransLp { w, a, p },
            OperatorConfig::TranslationC0 { w, a } => Space::TransC0 { w, a },
        }
    }

    /// Translation step `a`, if this is a translation.
    pub fn step(&self) -> Option<Rational64> {
        match *self {
            OperatorConfig::TranslationLp { a, .. } | OperatorConfig::TranslationC0 { a, .. } => Some(a),
            _ => None,
        }
    }

    fn check(&self, f: &Element) -> Result<()> {
        self.validate()?;
        self.space().check(f)
    }
}

/// `T f`.
pub fn apply_t(op: &OperatorConfig, f: &Element) -> Result<Element> {
    op.check(f)?;
    Ok(step_t(op, f))
}

/// `S f`, a right inverse: `T(S f) = f`.
pub fn apply_s(op: &OperatorConfig, f: &Element) -> Result<Element> {
    op.check(f)?;
    Ok(step_s(op, f))
}

pub(crate) fn step_t(op: &OperatorConfig, f: &Element) -> Element {
    match (op, f) {
        (OperatorConfig::Derivative, Element::Hardy(g)) => Element::Hardy(g.derivative()),
        (OperatorConfig::Laplacian, Element::Bivar(g)) => Element::Bivar(g.laplacian()),
        (
            OperatorConfig::TranslationLp { a, .. } | OperatorConfig::TranslationC0 { a, .. },
            Element::Piecewise(g),
        ) => Element::Piecewise(g.left_translate(*a)),
        _ => unreachable!("operator/element pairing is checked on entry"),
    }
}

pub(crate) fn step_s(op: &OperatorConfig, f: &Element) -> Element {
    match (op, f) {
        (OperatorConfig::Derivative, Element::Hardy(g)) => Element::Hardy(g.integral()),
        (OperatorConfig::Laplacian, Element::Bivar(g)) => Element::Bivar(g.laplacian_inverse()),
        (OperatorConfig::TranslationLp { a, .. }, Element::Piecewise(g)) => {
            Element::Piecewise(g.right_translate(*a))
        }
        (OperatorConfig::TranslationC0 { a, .. }, Element::Piecewise(g)) => {
            Element::Piecewise(right_translate_with_ramp(g, *a))
        }
        _ => unreachable!("operator/element pairing is checked on entry"),
    }
}

fn right_translate_with_ramp(g: &PiecewiseExpPoly, a: Rational64) -> PiecewiseExpPoly {
    let shifted = g.right_translate(a);
    let f0 = g.value_at_zero();
    if f0 == 0.0 {
        return shifted;
    }
    let slope = f0 / math::rat_to_f64(a);
    shifted.prepend(Piece::new(
        Rational64::zero(),
        a,
        vec![ExpTerm::new(slope, 1, Rational64::zero())],
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateResult {
    pub k: usize,
    pub value: Element,
    /// `value` lies in `D(T)`; always true for the representable dense classes.
    pub in_domain: bool,
}

/// `Tᵏ f` (or `Sᵏ f` when `use_s`).
///
/// For translations the result is cross-checked against the closed-form
/// composite weight `(Tᵏf)(t) = w^{kt + k(k−1)a/2} f(t + ka)` (and
/// `(Sᵏf)(t) = w^{−kt + k(k+1)a/2} f(t − ka)` for `t ≥ ka`).
pub fn iterate(op: &OperatorConfig, k: usize, f: &Element, use_s: bool) -> Result<IterateResult> {
    op.check(f)?;
    let mut value = f.clone();
    // symbolic weight exponent `slope·t + offset`, composed step by step
    let mut slope = Rational64::zero();
    let mut offset = Rational64::zero();
    for j in 1..=k {
        value = if use_s { step_s(op, &value) } else { step_t(op, &value) };
        if !value.is_finite() {
            return Err(Error::Capacity { k: j, max_safe_k: j - 1 });
        }
        if let Some(a) = op.step() {
            if use_s {
                offset = offset + a - slope * a;
                slope -= 1;
            } else {
                offset += slope * a;
                slope += 1;
            }
        }
    }
    if let (Some(a), Element::Piecewise(src), Element::Piecewise(out)) = (op.step(), f, &value) {
        let kk = Rational64::from_integer(k as i64);
        let (closed_slope, closed_offset) = if use_s {
            (-kk, kk * (kk + 1) * a / 2)
        } else {
            (kk, kk * (kk - 1) * a / 2)
        };
        if slope != closed_slope || offset != closed_offset {
            return Err(Error::DomainWeightMismatch { k });
        }
        check_weight_pointwise(src, out, math::rat_to_f64(slope), math::rat_to_f64(offset), math::rat_to_f64(kk * a), use_s)
            .map_err(|_| Error::DomainWeightMismatch { k })?;
    }
    Ok(IterateResult { k, value, in_domain: true })
}

fn check_weight_pointwise(
    src: &PiecewiseExpPoly,
    out: &PiecewiseExpPoly,
    slope: f64,
    offset: f64,
    shift: f64,
    use_s: bool,
) -> core::result::Result<(), ()> {
    let ln_w = math::ln(src.base());
    for p in out.pieces() {
        let t = 0.5 * (math::rat_to_f64(p.lo()) + math::rat_to_f64(p.hi()));
        if use_s && t < shift {
            continue;
        }
        let at = if use_s { t - shift } else { t + shift };
        let (got, _, got_ln) = out.split_value_at(t);
        let (src_value, src_magnitude, src_ln) = src.split_value_at(at);
        // weight · src / (out's own scale factor), finite even when each part is not
        let rel = math::exp((slope * t + offset) * ln_w + src_ln - got_ln);
        let expect = rel * src_value;
        let tol = 1e-8 * rel * src_magnitude + 1e-300;
        if (got - expect).abs().is_nan() || (got - expect).abs() > tol {
            return Err(());
        }
    }
    Ok(())
}
