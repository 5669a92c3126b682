//! Element types of the three function spaces, their norms and linear arithmetic.

mod bivar;
mod hardy;
mod piecewise;
pub mod quadrature;

use alloc::format;

use num_rational::Rational64;

use crate::error::{Error, Result};

pub use bivar::NormalizedBivarPoly;
pub use hardy::TaylorCoeffs;
pub use piecewise::{ExpTerm, Piece, PiecewiseExpPoly};

/// Continuity tolerances for elements of `C₀[0,∞)`.
pub const CONTINUITY_ABS_TOL: f64 = 1e-12;
pub const CONTINUITY_REL_TOL: f64 = 1e-9;

/// The normed space an element is measured in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Space {
    /// `H²` of the unit disc, ℓ² norm of Taylor coefficients.
    Hardy,
    /// Polynomials in `L²((0,1)²)`.
    BivarPoly,
    /// `L_p(0,∞)` carrying the weighted translation with base `w` and step `a`.
    TransLp { w: f64, a: Rational64, p: f64 },
    /// `C₀[0,∞)` with the sup norm.
    TransC0 { w: f64, a: Rational64 },
}

impl Space {
    pub fn name(&self) -> &'static str {
        match self {
            Space::Hardy => "hardy",
            Space::BivarPoly => "bivar",
            Space::TransLp { .. } => "translation-lp",
            Space::TransC0 { .. } => "translation-c0",
        }
    }

    pub fn zero(&self) -> Element {
        match *self {
            Space::Hardy => Element::Hardy(TaylorCoeffs::zero()),
            Space::BivarPoly => Element::Bivar(NormalizedBivarPoly::zero()),
            Space::TransLp { w, .. } | Space::TransC0 { w, .. } => {
                Element::Piecewise(PiecewiseExpPoly::zero(w))
            }
        }
    }

    /// Checks that `x` is a canonical element of this space (right variant,
    /// matching base, continuity for `C₀`).
    pub fn check(&self, x: &Element) -> Result<()> {
        match (self, x) {
            (Space::Hardy, Element::Hardy(_)) | (Space::BivarPoly, Element::Bivar(_)) => Ok(()),
            (Space::TransLp { w, .. }, Element::Piecewise(f)) => check_base(*w, f),
            (Space::TransC0 { w, .. }, Element::Piecewise(f)) => {
                check_base(*w, f)?;
                if f.is_continuous(CONTINUITY_ABS_TOL, CONTINUITY_REL_TOL) {
                    Ok(())
                } else {
                    Err(Error::NonCanonical("element of C0[0,inf) must be continuous".into()))
                }
            }
            _ => Err(Error::SpaceMismatch(format!(
                "{} element in {} space",
                x.kind(),
                self.name()
            ))),
        }
    }
}

fn check_base(w: f64, f: &PiecewiseExpPoly) -> Result<()> {
    if f.base() == w {
        Ok(())
    } else {
        Err(Error::SpaceMismatch(format!("element base {} differs from w = {w}", f.base())))
    }
}

/// An element of one of the three concrete dense classes.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Hardy(TaylorCoeffs),
    Bivar(NormalizedBivarPoly),
    Piecewise(PiecewiseExpPoly),
}

impl Element {
    pub fn kind(&self) -> &'static str {
        match self {
            Element::Hardy(_) => "hardy",
            Element::Bivar(_) => "bivar",
            Element::Piecewise(_) => "piecewise",
        }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        match self {
            Element::Hardy(f) => f.is_zero(tol),
            Element::Bivar(f) => f.is_zero(tol),
            Element::Piecewise(f) => f.is_zero(tol),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Element::Hardy(f) => f.is_finite(),
            Element::Bivar(f) => f.is_finite(),
            Element::Piecewise(f) => f.is_finite(),
        }
    }

    pub fn as_hardy(&self) -> Option<&TaylorCoeffs> {
        match self {
            Element::Hardy(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_bivar(&self) -> Option<&NormalizedBivarPoly> {
        match self {
            Element::Bivar(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_piecewise(&self) -> Option<&PiecewiseExpPoly> {
        match self {
            Element::Piecewise(f) => Some(f),
            _ => None,
        }
    }
}

/// Space norm of `x`.
pub fn norm(space: &Space, x: &Element) -> Result<f64> {
    match (space, x) {
        (Space::Hardy, Element::Hardy(f)) => Ok(f.norm()),
        (Space::BivarPoly, Element::Bivar(f)) => Ok(f.norm()),
        (Space::TransLp { w, p, .. }, Element::Piecewise(f)) => {
            check_base(*w, f)?;
            Ok(f.norm_lp(*p))
        }
        (Space::TransC0 { w, .. }, Element::Piecewise(f)) => {
            check_base(*w, f)?;
            Ok(f.norm_sup())
        }
        _ => Err(Error::SpaceMismatch(format!("{} element in {} space", x.kind(), space.name()))),
    }
}

pub fn add(x: &Element, y: &Element) -> Result<Element> {
    match (x, y) {
        (Element::Hardy(f), Element::Hardy(g)) => Ok(Element::Hardy(f.add(g))),
        (Element::Bivar(f), Element::Bivar(g)) => Ok(Element::Bivar(f.add(g))),
        (Element::Piecewise(f), Element::Piecewise(g)) => Ok(Element::Piecewise(f.add(g)?)),
        _ => Err(mixed(x, y)),
    }
}

pub fn sub(x: &Element, y: &Element) -> Result<Element> {
    match (x, y) {
        (Element::Hardy(f), Element::Hardy(g)) => Ok(Element::Hardy(f.sub(g))),
        (Element::Bivar(f), Element::Bivar(g)) => Ok(Element::Bivar(f.sub(g))),
        (Element::Piecewise(f), Element::Piecewise(g)) => Ok(Element::Piecewise(f.sub(g)?)),
        _ => Err(mixed(x, y)),
    }
}

/// Real scalar multiple; Hardy elements also accept complex scalars through
/// [`TaylorCoeffs::scale`].
pub fn scale(alpha: f64, x: &Element) -> Element {
    match x {
        Element::Hardy(f) => Element::Hardy(f.scale(num_complex::Complex64::new(alpha, 0.0))),
        Element::Bivar(f) => Element::Bivar(f.scale(alpha)),
        Element::Piecewise(f) => Element::Piecewise(f.scale(alpha)),
    }
}

/// `‖x − y‖` in `space`.
pub fn distance(space: &Space, x: &Element, y: &Element) -> Result<f64> {
    norm(space, &sub(x, y)?)
}

fn mixed(x: &Element, y: &Element) -> Error {
    Error::SpaceMismatch(format!("{} and {} elements", x.kind(), y.kind()))
}

/// Open ball `{u : ‖u − center‖ < radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallSpec {
    pub space: Space,
    pub center: Element,
    pub radius: f64,
}

impl BallSpec {
    pub fn new(space: Space, center: Element, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidArgument(format!("radius {radius} must be positive")));
        }
        space.check(&center)?;
        Ok(BallSpec { space, center, radius })
    }

    /// Strict membership, returning the distance to the center as well.
    pub fn contains(&self, u: &Element) -> Result<(bool, f64)> {
        let d = distance(&self.space, u, &self.center)?;
        Ok((d < self.radius, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_examples() {
        let one = Element::Hardy(TaylorCoeffs::from_real(&[1.0]).unwrap());
        assert_eq!(norm(&Space::Hardy, &one).unwrap(), 1.0);
        let sq = Element::Bivar(NormalizedBivarPoly::basis(0, 0, 1.0));
        assert_eq!(norm(&Space::BivarPoly, &sq).unwrap(), 1.0);
        let lp = Space::TransLp { w: 2.0, a: Rational64::from_integer(1), p: 1.0 };
        let chi = Element::Piecewise(
            PiecewiseExpPoly::indicator(2.0, Rational64::from_integer(0), Rational64::from_integer(1))
                .unwrap(),
        );
        assert!((norm(&lp, &chi).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(distance(&lp, &chi, &chi).unwrap(), 0.0);
        assert!(scale(0.0, &chi).is_zero(0.0));
    }

    #[test]
    fn mixed_operands_are_rejected() {
        let a = Element::Hardy(TaylorCoeffs::zero());
        let b = Element::Bivar(NormalizedBivarPoly::zero());
        assert!(matches!(add(&a, &b), Err(Error::SpaceMismatch(_))));
        assert!(norm(&Space::Hardy, &b).is_err());
    }

    #[test]
    fn ball_radius_must_be_positive() {
        let c = Element::Hardy(TaylorCoeffs::zero());
        assert!(BallSpec::new(Space::Hardy, c.clone(), 0.0).is_err());
        let ball = BallSpec::new(Space::Hardy, c, 0.5).unwrap();
        let half = Element::Hardy(TaylorCoeffs::from_real(&[0.5]).unwrap());
        assert_eq!(ball.contains(&half).unwrap(), (false, 0.5));
    }
}
