//! Compactly supported piecewise exponential-polynomials on the half line.
//!
//! A piece on `[lo, hi)` stores its terms in local coordinates `s = t − lo`:
//!
//! ```text
//! f(t) = w^scale · Σ c · sᵈ · w^{q s}        lo ≤ t < hi
//! ```
//!
//! `lo`, `hi`, `scale` and every rate `q` are exact rationals, so the weighted
//! translations only move rationals around: `(Tf)(t) = wᵗ f(t+a)` shifts the
//! piece left, adds `lo − a` to `scale` and `1` to each rate. Coefficients are
//! re-expanded (binomially) only when a piece is cut at an interior point.

use alloc::format;
use alloc::vec::Vec;

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use super::quadrature;
use crate::error::{Error, Result};
use crate::math;

const SUP_SAMPLES: usize = 64;
const SUP_BISECTION_TOL: f64 = 1e-12;
const QUAD_ORDER: usize = 10;
const QUAD_REL_TOL: f64 = 1e-12;

/// `c · sᵈ · w^{q s}` in the local coordinate of its piece.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpTerm {
    pub coeff: f64,
    pub degree: u32,
    pub rate: Rational64,
}

impl ExpTerm {
    pub fn new(coeff: f64, degree: u32, rate: Rational64) -> Self {
        ExpTerm { coeff, degree, rate }
    }

    pub fn constant(coeff: f64) -> Self {
        ExpTerm::new(coeff, 0, Rational64::zero())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    lo: Rational64,
    hi: Rational64,
    scale: Rational64,
    terms: Vec<ExpTerm>,
}

impl Piece {
    pub fn new(lo: Rational64, hi: Rational64, terms: Vec<ExpTerm>) -> Self {
        Piece { lo, hi, scale: Rational64::zero(), terms }
    }

    pub fn with_scale(mut self, scale: Rational64) -> Self {
        self.scale = scale;
        self
    }

    pub fn lo(&self) -> Rational64 {
        self.lo
    }

    pub fn hi(&self) -> Rational64 {
        self.hi
    }

    /// Exponent of the common factor `w^scale`.
    pub fn scale(&self) -> Rational64 {
        self.scale
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    fn len(&self) -> f64 {
        math::rat_to_f64(self.hi - self.lo)
    }

    fn factor(&self, ln_w: f64) -> f64 {
        math::exp(math::rat_to_f64(self.scale) * ln_w)
    }

    /// Value without the `w^scale` factor at local coordinate `s`.
    fn eval_local(&self, s: f64, ln_w: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.coeff * math::powi(s, t.degree) * math::exp(math::rat_to_f64(t.rate) * ln_w * s)
            })
            .sum()
    }

    fn abs_local(&self, s: f64, ln_w: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| (t.coeff * math::powi(s, t.degree) * math::exp(math::rat_to_f64(t.rate) * ln_w * s)).abs())
            .sum()
    }

    fn deriv_local(&self, s: f64, ln_w: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let k = math::rat_to_f64(t.rate) * ln_w;
                let poly = if t.degree == 0 {
                    k
                } else {
                    t.degree as f64 * math::powi(s, t.degree - 1) + k * math::powi(s, t.degree)
                };
                t.coeff * poly * math::exp(k * s)
            })
            .sum()
    }

    fn max_coeff(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).fold(0.0, f64::max)
    }

    /// Same function, local origin moved to `new_lo ≥ lo`.
    fn rebased(&self, new_lo: Rational64, ln_w: f64) -> Piece {
        debug_assert!(new_lo >= self.lo);
        if new_lo == self.lo {
            return self.clone();
        }
        let delta = math::rat_to_f64(new_lo - self.lo);
        let mut terms = Vec::new();
        for t in &self.terms {
            let head = t.coeff * math::exp(math::rat_to_f64(t.rate) * delta * ln_w);
            for i in 0..=t.degree {
                let c = head * math::binomial(t.degree, i) * math::powi(delta, t.degree - i);
                terms.push(ExpTerm::new(c, i, t.rate));
            }
        }
        Piece { lo: new_lo, hi: self.hi, scale: self.scale, terms: merge_terms(terms) }
    }

    /// Restriction to `[a, b) ⊆ [lo, hi)`.
    fn restricted(&self, a: Rational64, b: Rational64, ln_w: f64) -> Piece {
        let mut p = self.rebased(a, ln_w);
        p.hi = b;
        p
    }

    /// `sup_{[0, L]} |g|` of the unscaled local function.
    fn sup_local(&self, ln_w: f64) -> f64 {
        let len = self.len();
        let mut best = self.eval_local(0.0, ln_w).abs().max(self.eval_local(len, ln_w).abs());
        if let [t] = self.terms.as_slice() {
            let k = math::rat_to_f64(t.rate) * ln_w;
            if t.degree > 0 && k != 0.0 {
                let s = -(t.degree as f64) / k;
                if s > 0.0 && s < len {
                    best = best.max(self.eval_local(s, ln_w).abs());
                }
            }
            return best;
        }
        let step = len / SUP_SAMPLES as f64;
        let mut prev_s = 0.0;
        let mut prev_d = self.deriv_local(0.0, ln_w);
        for i in 1..=SUP_SAMPLES {
            let s = if i == SUP_SAMPLES { len } else { step * i as f64 };
            best = best.max(self.eval_local(s, ln_w).abs());
            let d = self.deriv_local(s, ln_w);
            if prev_d != 0.0 && d != 0.0 && (prev_d < 0.0) != (d < 0.0) {
                let (mut lo, mut hi, mut dlo) = (prev_s, s, prev_d);
                while hi - lo > SUP_BISECTION_TOL {
                    let mid = 0.5 * (lo + hi);
                    let dm = self.deriv_local(mid, ln_w);
                    if (dm < 0.0) == (dlo < 0.0) {
                        lo = mid;
                        dlo = dm;
                    } else {
                        hi = mid;
                    }
                }
                best = best.max(self.eval_local(0.5 * (lo + hi), ln_w).abs());
            }
            prev_s = s;
            prev_d = d;
        }
        best
    }

    /// Interior zeros of the local function located by sampling and bisection;
    /// `|f|^p` has a kink there, so quadrature panels are cut at them.
    fn sign_changes(&self, ln_w: f64) -> Vec<f64> {
        let len = self.len();
        let step = len / SUP_SAMPLES as f64;
        let mut out = Vec::new();
        let mut prev_s = 0.0;
        let mut prev = self.eval_local(0.0, ln_w);
        for i in 1..SUP_SAMPLES {
            let s = step * i as f64;
            let v = self.eval_local(s, ln_w);
            if prev != 0.0 && v != 0.0 && (prev < 0.0) != (v < 0.0) {
                let (mut lo, mut hi, mut vlo) = (prev_s, s, prev);
                while hi - lo > 1e-15 * len.max(1.0) {
                    let mid = 0.5 * (lo + hi);
                    let vm = self.eval_local(mid, ln_w);
                    if vm == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if (vm < 0.0) == (vlo < 0.0) {
                        lo = mid;
                        vlo = vm;
                    } else {
                        hi = mid;
                    }
                }
                out.push(0.5 * (lo + hi));
            }
            prev_s = s;
            prev = v;
        }
        out
    }

    /// `ln ∫_{lo}^{hi} |f|^p`, including the `w^scale` factor.
    fn ln_lp_power(&self, p: f64, ln_w: f64) -> f64 {
        let m = self.max_coeff();
        if m == 0.0 {
            return f64::NEG_INFINITY;
        }
        let len = self.len();
        let integral = match self.terms.as_slice() {
            [t] if t.degree == 0 => {
                quadrature::exp_integral(p * math::rat_to_f64(t.rate) * ln_w, len)
            }
            _ => {
                let integrand = |s: f64| math::powf((self.eval_local(s, ln_w) / m).abs(), p);
                let mut bounds = alloc::vec![0.0];
                bounds.extend(self.sign_changes(ln_w));
                bounds.push(len);
                // absolute tolerance scaled to the integral, not to the coefficients
                let rule = quadrature::GaussLegendre::new(QUAD_ORDER);
                let coarse: f64 = bounds.windows(2).map(|c| rule.integrate(&integrand, c[0], c[1])).sum();
                let abs_tol = QUAD_REL_TOL * coarse.abs() + f64::MIN_POSITIVE;
                bounds
                    .windows(2)
                    .map(|c| quadrature::adaptive(&integrand, c[0], c[1], abs_tol, QUAD_REL_TOL))
                    .sum()
            }
        };
        if integral <= 0.0 {
            return f64::NEG_INFINITY;
        }
        p * (math::rat_to_f64(self.scale) * ln_w + math::ln(m)) + math::ln(integral)
    }
}

fn merge_terms(mut terms: Vec<ExpTerm>) -> Vec<ExpTerm> {
    terms.sort_by(|a, b| a.degree.cmp(&b.degree).then(a.rate.cmp(&b.rate)));
    let mut out: Vec<ExpTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(last) if last.degree == t.degree && last.rate == t.rate => last.coeff += t.coeff,
            _ => out.push(t),
        }
    }
    out.retain(|t| t.coeff != 0.0);
    out
}

/// Sorted, pairwise disjoint pieces over a common base `w > 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseExpPoly {
    base: f64,
    pieces: Vec<Piece>,
}

impl PiecewiseExpPoly {
    /// Validates and canonicalizes: like terms merged, zero terms and empty
    /// pieces dropped.
    pub fn new(base: f64, pieces: Vec<Piece>) -> Result<Self> {
        if !(base.is_finite() && base > 1.0) {
            return Err(Error::NonCanonical(format!("base w = {base} must be finite and > 1")));
        }
        for (i, p) in pieces.iter().enumerate() {
            if p.lo.is_negative() {
                return Err(Error::NonCanonical(format!("piece {i} starts below 0")));
            }
            if p.hi <= p.lo {
                return Err(Error::NonCanonical(format!("piece {i} has empty interval")));
            }
            if p.terms.iter().any(|t| !t.coeff.is_finite()) {
                return Err(Error::NonCanonical(format!("piece {i} has a non-finite coefficient")));
            }
            if i > 0 && pieces[i - 1].hi > p.lo {
                return Err(Error::NonCanonical(format!("piece {i} overlaps or precedes piece {}", i - 1)));
            }
        }
        Ok(Self::from_parts(base, pieces))
    }

    fn from_parts(base: f64, pieces: Vec<Piece>) -> Self {
        let pieces = pieces
            .into_iter()
            .map(|mut p| {
                p.terms = merge_terms(p.terms);
                p
            })
            .filter(|p| !p.terms.is_empty())
            .collect();
        PiecewiseExpPoly { base, pieces }
    }

    pub fn zero(base: f64) -> Self {
        PiecewiseExpPoly { base, pieces: Vec::new() }
    }

    /// `χ_[lo, hi)`.
    pub fn indicator(base: f64, lo: Rational64, hi: Rational64) -> Result<Self> {
        Self::new(base, alloc::vec![Piece::new(lo, hi, alloc::vec![ExpTerm::constant(1.0)])])
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    fn ln_w(&self) -> f64 {
        math::ln(self.base)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Right end of the support, `None` for the zero function.
    pub fn support_end(&self) -> Option<Rational64> {
        self.pieces.last().map(|p| p.hi)
    }

    /// Every coefficient, with its piece factor, is below `tol` in magnitude.
    pub fn is_zero(&self, tol: f64) -> bool {
        let ln_w = self.ln_w();
        self.pieces
            .iter()
            .all(|p| p.terms.iter().all(|t| (t.coeff * p.factor(ln_w)).abs() <= tol))
    }

    pub fn is_finite(&self) -> bool {
        self.pieces.iter().all(|p| p.terms.iter().all(|t| t.coeff.is_finite()))
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let ln_w = self.ln_w();
        for p in &self.pieces {
            let (lo, hi) = (math::rat_to_f64(p.lo), math::rat_to_f64(p.hi));
            if t >= lo && t < hi {
                return p.factor(ln_w) * p.eval_local(t - lo, ln_w);
            }
        }
        0.0
    }

    /// `(local value, local magnitude, scale·ln w)` at `t`, so that the value is
    /// `local · e^{scale·ln w}` even when the factor itself is out of range.
    pub(crate) fn split_value_at(&self, t: f64) -> (f64, f64, f64) {
        let ln_w = self.ln_w();
        for p in &self.pieces {
            let (lo, hi) = (math::rat_to_f64(p.lo), math::rat_to_f64(p.hi));
            if t >= lo && t < hi {
                let s = t - lo;
                let magnitude = p
                    .terms
                    .iter()
                    .map(|tm| (tm.coeff * math::powi(s, tm.degree) * math::exp(math::rat_to_f64(tm.rate) * ln_w * s)).abs())
                    .sum();
                return (p.eval_local(s, ln_w), magnitude, math::rat_to_f64(p.scale) * ln_w);
            }
        }
        (0.0, 0.0, 0.0)
    }

    /// Value at an exact rational point (right-continuous convention).
    pub fn value_at_rational(&self, t: Rational64) -> f64 {
        let ln_w = self.ln_w();
        self.pieces
            .iter()
            .find(|p| p.lo <= t && t < p.hi)
            .map(|p| p.factor(ln_w) * p.eval_local(math::rat_to_f64(t - p.lo), ln_w))
            .unwrap_or(0.0)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        if alpha == 0.0 {
            return Self::zero(self.base);
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let mut p = p.clone();
                for t in &mut p.terms {
                    t.coeff *= alpha;
                }
                p
            })
            .collect();
        Self::from_parts(self.base, pieces)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self> {
        if self.base != other.base {
            return Err(Error::SpaceMismatch(format!(
                "bases {} and {} differ",
                self.base, other.base
            )));
        }
        let ln_w = self.ln_w();
        let mut cuts: Vec<Rational64> = self
            .pieces
            .iter()
            .chain(&other.pieces)
            .flat_map(|p| [p.lo, p.hi])
            .collect();
        cuts.sort();
        cuts.dedup();

        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            while i < self.pieces.len() && self.pieces[i].hi <= a {
                i += 1;
            }
            while j < other.pieces.len() && other.pieces[j].hi <= a {
                j += 1;
            }
            let left = self.pieces.get(i).filter(|p| p.lo <= a).map(|p| p.restricted(a, b, ln_w));
            let right = other.pieces.get(j).filter(|p| p.lo <= a).map(|p| {
                let mut q = p.restricted(a, b, ln_w);
                for t in &mut q.terms {
                    t.coeff *= sign;
                }
                q
            });
            match (left, right) {
                (Some(p), None) | (None, Some(p)) => out.push(p),
                (Some(p), Some(q)) => {
                    let scale = p.scale.max(q.scale);
                    let mut terms = Vec::with_capacity(p.terms.len() + q.terms.len());
                    for src in [&p, &q] {
                        let f = math::exp(math::rat_to_f64(src.scale - scale) * ln_w);
                        terms.extend(src.terms.iter().map(|t| ExpTerm::new(t.coeff * f, t.degree, t.rate)));
                    }
                    out.push(Piece { lo: a, hi: b, scale, terms });
                }
                (None, None) => {}
            }
        }
        Ok(Self::from_parts(self.base, out))
    }

    /// Restriction to `[lo, hi)`; pieces are cut (and re-expanded) at the ends.
    pub fn restrict(&self, lo: Rational64, hi: Rational64) -> Self {
        let ln_w = self.ln_w();
        let pieces = self
            .pieces
            .iter()
            .filter(|p| p.hi > lo && p.lo < hi)
            .map(|p| p.restricted(p.lo.max(lo), p.hi.min(hi), ln_w))
            .collect();
        Self::from_parts(self.base, pieces)
    }

    /// Splits every piece containing `at` in its interior.
    pub fn split_at(&self, at: Rational64) -> Self {
        let ln_w = self.ln_w();
        let mut pieces = Vec::with_capacity(self.pieces.len() + 1);
        for p in &self.pieces {
            if p.lo < at && at < p.hi {
                let mut left = p.clone();
                left.hi = at;
                pieces.push(left);
                pieces.push(p.rebased(at, ln_w));
            } else {
                pieces.push(p.clone());
            }
        }
        Self::from_parts(self.base, pieces)
    }

    /// `(Tf)(t) = wᵗ f(t + a)` on `t ≥ 0`.
    pub fn left_translate(&self, a: Rational64) -> Self {
        let ln_w = self.ln_w();
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            if p.hi <= a {
                continue;
            }
            let p = if p.lo < a { p.rebased(a, ln_w) } else { p.clone() };
            let lo = p.lo - a;
            pieces.push(Piece {
                lo,
                hi: p.hi - a,
                scale: p.scale + lo,
                terms: p
                    .terms
                    .iter()
                    .map(|t| ExpTerm::new(t.coeff, t.degree, t.rate + 1))
                    .collect(),
            });
        }
        Self::from_parts(self.base, pieces)
    }

    /// `(Sf)(t) = w^{−(t−a)} f(t − a)` for `t ≥ a`, zero on `[0, a)`.
    pub fn right_translate(&self, a: Rational64) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                lo: p.lo + a,
                hi: p.hi + a,
                scale: p.scale - p.lo,
                terms: p
                    .terms
                    .iter()
                    .map(|t| ExpTerm::new(t.coeff, t.degree, t.rate - 1))
                    .collect(),
            })
            .collect();
        PiecewiseExpPoly { base: self.base, pieces }
    }

    /// `w^scale · Σ |c sᵈ w^{q s}|` at `t`: a magnitude scale for comparing
    /// values computed along different routes.
    pub fn magnitude_at(&self, t: f64) -> f64 {
        let ln_w = self.ln_w();
        for p in &self.pieces {
            let (lo, hi) = (math::rat_to_f64(p.lo), math::rat_to_f64(p.hi));
            if t >= lo && t < hi {
                let s = t - lo;
                let sum: f64 = p
                    .terms
                    .iter()
                    .map(|tm| {
                        (tm.coeff * math::powi(s, tm.degree) * math::exp(math::rat_to_f64(tm.rate) * ln_w * s))
                            .abs()
                    })
                    .sum();
                return p.factor(ln_w) * sum;
            }
        }
        0.0
    }

    pub fn value_at_zero(&self) -> f64 {
        self.value_at_rational(Rational64::zero())
    }

    /// Inserts `piece` ahead of the existing ones; it must end at or before the
    /// first current piece.
    pub(crate) fn prepend(&self, piece: Piece) -> Self {
        debug_assert!(self.pieces.first().is_none_or(|p| p.lo >= piece.hi));
        let mut pieces = Vec::with_capacity(self.pieces.len() + 1);
        pieces.push(piece);
        pieces.extend(self.pieces.iter().cloned());
        Self::from_parts(self.base, pieces)
    }

    /// `‖f‖_p = (∫₀^∞ |f|^p)^{1/p}`; closed form for single constant-degree
    /// terms, adaptive Gauss–Legendre otherwise.
    pub fn norm_lp(&self, p: f64) -> f64 {
        let ln_w = self.ln_w();
        let parts: Vec<f64> = self.pieces.iter().map(|pc| pc.ln_lp_power(p, ln_w)).collect();
        let total = math::log_sum_exp(parts.iter().copied());
        if total == f64::NEG_INFINITY {
            0.0
        } else {
            math::exp(total / p)
        }
    }

    pub fn norm_sup(&self) -> f64 {
        let ln_w = self.ln_w();
        let best = self
            .pieces
            .iter()
            .map(|pc| {
                let s = pc.sup_local(ln_w);
                if s == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    math::rat_to_f64(pc.scale) * ln_w + math::ln(s)
                }
            })
            .fold(f64::NEG_INFINITY, f64::max);
        if best == f64::NEG_INFINITY {
            0.0
        } else {
            math::exp(best)
        }
    }

    /// Continuity on `[0, ∞)`: neighbouring pieces agree at shared breakpoints
    /// and the function reaches 0 at every gap and at the end of the support.
    /// The relative tolerance applies to the sum of the term magnitudes.
    pub fn is_continuous(&self, abs_tol: f64, rel_tol: f64) -> bool {
        let ln_w = self.ln_w();
        // (local value, local magnitude, ln of the w^scale factor)
        let side = |p: &Piece, s: f64| (p.eval_local(s, ln_w), p.abs_local(s, ln_w), math::rat_to_f64(p.scale) * ln_w);
        let vanishes = |(v, mag, lf): (f64, f64, f64)| v.abs() <= abs_tol * math::exp(-lf) + rel_tol * mag;
        let agree = |(lv, lm, lf): (f64, f64, f64), (rv, rm, rf): (f64, f64, f64)| {
            let top = lf.max(rf);
            let (l, r) = (math::exp(lf - top), math::exp(rf - top));
            (lv * l - rv * r).abs() <= abs_tol * math::exp(-top) + rel_tol * (lm * l).max(rm * r)
        };
        let mut prev: Option<(Rational64, (f64, f64, f64))> = None;
        for p in &self.pieces {
            let start = side(p, 0.0);
            let ok = match prev {
                Some((end, left)) if end == p.lo => agree(left, start),
                Some((_, left)) => vanishes(left) && vanishes(start),
                None => p.lo.is_zero() || vanishes(start),
            };
            if !ok {
                return false;
            }
            prev = Some((p.hi, side(p, p.len())));
        }
        prev.is_none_or(|(_, left)| vanishes(left))
    }
}
