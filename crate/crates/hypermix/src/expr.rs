//! Hand-writable element literals.
//!
//! ```text
//! expr    := ['+'|'-'] term (('+'|'-') term)*
//! term    := factor ('*' factor)*
//! factor  := number | number'i' | 'i' | 'z' ['^' int]
//!          | 'X(' int ')' | 'Y(' int ')'
//!          | 'chi(' rat ',' rat ')' | 'ramp' ['(' rat ')'] | 'bump(' rat ',' rat ')'
//! rat     := number ['/' number]
//! ```
//!
//! `z` builds Taylor series, `X(n)Y(l)` normalized bivariate monomials, and the
//! last three forms piecewise functions on the half line: `chi(lo,hi)` is the
//! indicator of `[lo,hi)`, `ramp(h)` is `1 − t/h` on `[0,h)` (`h = 1` by
//! default) and `bump(lo,hi)` is `(t−lo)(hi−t)` on `[lo,hi)`. Decimal
//! breakpoints are read as exact rationals, so `chi(0,2.5)` ends at `5/2`.

use hypermix_core::spaces::{Element, ExpTerm, NormalizedBivarPoly, Piece, PiecewiseExpPoly, Space, TaylorCoeffs};
use hypermix_core::{Complex64, Rational64};

use crate::format::rational_from_str;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("cannot parse `{input}`: {message}")]
pub struct ExprError {
    pub input: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(String),
    Imag(String),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            if i < chars.len() && chars[i] == 'i' && !chars.get(i + 1).is_some_and(|c| c.is_alphanumeric()) {
                i += 1;
                out.push(Token::Imag(text));
            } else {
                out.push(Token::Num(text));
            }
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*^(),/".contains(c) {
            out.push(Token::Sym(c));
            i += 1;
        } else {
            return Err(format!("unexpected character `{c}`"));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Basis {
    One,
    Z(usize),
    XY(u32, u32),
    Chi(Rational64, Rational64),
    Ramp(Rational64),
    Bump(Rational64, Rational64),
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), String> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(format!("expected `{c}`"))
        }
    }

    fn float(text: &str) -> Result<f64, String> {
        text.parse().map_err(|_| format!("bad number `{text}`"))
    }

    fn int(&mut self) -> Result<u32, String> {
        match self.next() {
            Some(Token::Num(t)) => t.parse().map_err(|_| format!("expected an integer, found `{t}`")),
            _ => Err("expected an integer".into()),
        }
    }

    fn rational(&mut self) -> Result<Rational64, String> {
        let neg = self.eat('-');
        let num = match self.next() {
            Some(Token::Num(t)) => rational_from_str(&t).ok_or_else(|| format!("bad rational `{t}`"))?,
            _ => return Err("expected a rational".into()),
        };
        let value = if self.eat('/') {
            let den = match self.next() {
                Some(Token::Num(t)) => rational_from_str(&t).ok_or_else(|| format!("bad rational `{t}`"))?,
                _ => return Err("expected a denominator".into()),
            };
            if den == Rational64::from_integer(0) {
                return Err("zero denominator".into());
            }
            num / den
        } else {
            num
        };
        Ok(if neg { -value } else { value })
    }

    fn pair(&mut self) -> Result<(Rational64, Rational64), String> {
        self.expect('(')?;
        let lo = self.rational()?;
        self.expect(',')?;
        let hi = self.rational()?;
        self.expect(')')?;
        Ok((lo, hi))
    }

    fn expr(&mut self) -> Result<Vec<(Complex64, Basis)>, String> {
        let mut terms = Vec::new();
        let mut sign = if self.eat('-') {
            -1.0
        } else {
            self.eat('+');
            1.0
        };
        loop {
            let (c, b) = self.term()?;
            terms.push((c * sign, b));
            if self.eat('+') {
                sign = 1.0;
            } else if self.eat('-') {
                sign = -1.0;
            } else {
                break;
            }
        }
        if let Some(t) = self.peek() {
            return Err(format!("unexpected {t:?}"));
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<(Complex64, Basis), String> {
        let mut coeff = Complex64::new(1.0, 0.0);
        let mut basis = Basis::One;
        loop {
            match self.next() {
                Some(Token::Num(t)) => coeff *= Self::float(&t)?,
                Some(Token::Imag(t)) => coeff *= Complex64::new(0.0, Self::float(&t)?),
                Some(Token::Ident(name)) => {
                    let b = match name.as_str() {
                        "i" => {
                            coeff *= Complex64::new(0.0, 1.0);
                            None
                        }
                        "z" => Some(Basis::Z(if self.eat('^') { self.int()? as usize } else { 1 })),
                        "X" | "Y" => {
                            self.expect('(')?;
                            let k = self.int()?;
                            self.expect(')')?;
                            Some(if name == "X" { Basis::XY(k, 0) } else { Basis::XY(0, k) })
                        }
                        "chi" => {
                            let (lo, hi) = self.pair()?;
                            Some(Basis::Chi(lo, hi))
                        }
                        "bump" => {
                            let (lo, hi) = self.pair()?;
                            Some(Basis::Bump(lo, hi))
                        }
                        "ramp" => {
                            let h = if self.eat('(') {
                                let h = self.rational()?;
                                self.expect(')')?;
                                h
                            } else {
                                Rational64::from_integer(1)
                            };
                            Some(Basis::Ramp(h))
                        }
                        other => return Err(format!("unknown name `{other}`")),
                    };
                    if let Some(b) = b {
                        basis = combine(basis, b)?;
                    }
                }
                other => return Err(format!("expected a factor, found {other:?}")),
            }
            if !self.eat('*') {
                // juxtaposition such as `X(1)Y(2)` or `2z`
                match self.peek() {
                    Some(Token::Ident(_)) => continue,
                    _ => break,
                }
            }
        }
        Ok((coeff, basis))
    }
}

fn combine(a: Basis, b: Basis) -> Result<Basis, String> {
    match (a, b) {
        (Basis::One, b) => Ok(b),
        (Basis::Z(j), Basis::Z(k)) => Ok(Basis::Z(j + k)),
        (Basis::XY(n, l), Basis::XY(m, k)) if (n == 0 || m == 0) && (l == 0 || k == 0) => Ok(Basis::XY(n + m, l + k)),
        _ => Err("unsupported product of basis factors".into()),
    }
}

fn real(c: Complex64) -> Result<f64, String> {
    if c.im == 0.0 {
        Ok(c.re)
    } else {
        Err("complex coefficients are only allowed for Taylor series".into())
    }
}

fn build(space: &Space, terms: Vec<(Complex64, Basis)>) -> Result<Element, String> {
    match *space {
        Space::Hardy => {
            let mut f = TaylorCoeffs::zero();
            for (c, b) in terms {
                let k = match b {
                    Basis::One => 0,
                    Basis::Z(k) => k,
                    _ => return Err("only constants and powers of z live in the Hardy space".into()),
                };
                f = f.add(&TaylorCoeffs::monomial(k, c));
            }
            Ok(Element::Hardy(f))
        }
        Space::BivarPoly => {
            let mut f = NormalizedBivarPoly::zero();
            for (c, b) in terms {
                let (n, l) = match b {
                    Basis::One => (0, 0),
                    Basis::XY(n, l) => (n, l),
                    _ => return Err("only X(n)Y(l) monomials live in the bivariate space".into()),
                };
                f = f.add(&NormalizedBivarPoly::basis(n, l, real(c)?));
            }
            Ok(Element::Bivar(f))
        }
        Space::TransLp { w, .. } | Space::TransC0 { w, .. } => {
            let mut f = PiecewiseExpPoly::zero(w);
            let zero = Rational64::from_integer(0);
            for (c, b) in terms {
                let c = real(c)?;
                let piece = match b {
                    Basis::One if c == 0.0 => continue,
                    Basis::Chi(lo, hi) => Piece::new(lo, hi, vec![ExpTerm::constant(c)]),
                    Basis::Ramp(h) => {
                        let slope = -c / (*h.numer() as f64 / *h.denom() as f64);
                        Piece::new(zero, h, vec![ExpTerm::constant(c), ExpTerm::new(slope, 1, zero)])
                    }
                    Basis::Bump(lo, hi) => {
                        let len = hi - lo;
                        let len = *len.numer() as f64 / *len.denom() as f64;
                        Piece::new(lo, hi, vec![ExpTerm::new(c * len, 1, zero), ExpTerm::new(-c, 2, zero)])
                    }
                    _ => return Err("half-line elements are built from chi, ramp and bump".into()),
                };
                let g = PiecewiseExpPoly::new(w, vec![piece]).map_err(|e| e.to_string())?;
                f = f.add(&g).map_err(|e| e.to_string())?;
            }
            Ok(Element::Piecewise(f))
        }
    }
}

/// Parses `input` as an element of `space`.
pub fn parse_element(space: &Space, input: &str) -> Result<Element, ExprError> {
    let err = |message: String| ExprError { input: input.to_string(), message };
    let tokens = tokenize(input).map_err(err)?;
    if tokens.is_empty() {
        return Err(err("empty expression".into()));
    }
    let terms = Parser { tokens, pos: 0 }.expr().map_err(err)?;
    let x = build(space, terms).map_err(err)?;
    space.check(&x).map_err(|e| err(e.to_string()))?;
    Ok(x)
}

/// Parses a complex scalar such as `2`, `-1.5`, `2i` or `1 - 3i`.
pub fn parse_complex(input: &str) -> Result<Complex64, ExprError> {
    let err = |message: String| ExprError { input: input.to_string(), message };
    let tokens = tokenize(input).map_err(err)?;
    if tokens.is_empty() {
        return Err(err("empty expression".into()));
    }
    let terms = Parser { tokens, pos: 0 }.expr().map_err(err)?;
    terms.into_iter().try_fold(Complex64::new(0.0, 0.0), |acc, (c, b)| match b {
        Basis::One => Ok(acc + c),
        _ => Err(err("expected a scalar".into())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    #[test]
    fn taylor_literals() {
        let x = parse_element(&Space::Hardy, "1 + 2*z^3").unwrap();
        let f = x.as_hardy().unwrap();
        assert_eq!(f.coeffs().len(), 4);
        assert_eq!(f.coeff(3), Complex64::new(2.0, 0.0));
        let y = parse_element(&Space::Hardy, "-2i*z + z*z - 0.5").unwrap();
        let g = y.as_hardy().unwrap();
        assert_eq!(g.coeff(0), Complex64::new(-0.5, 0.0));
        assert_eq!(g.coeff(1), Complex64::new(0.0, -2.0));
        assert_eq!(g.coeff(2), Complex64::new(1.0, 0.0));
        assert!(parse_element(&Space::Hardy, "0").unwrap().is_zero(0.0));
    }

    #[test]
    fn bivar_literals() {
        let x = parse_element(&Space::BivarPoly, "X(1)Y(1) - 3*X(2) + 1").unwrap();
        let f = x.as_bivar().unwrap();
        assert_eq!((f.coeff(1, 1), f.coeff(2, 0), f.coeff(0, 0)), (1.0, -3.0, 1.0));
        assert!(parse_element(&Space::BivarPoly, "z").is_err());
        assert!(parse_element(&Space::BivarPoly, "2i*X(1)").is_err());
    }

    #[test]
    fn half_line_literals() {
        let lp = Space::TransLp { w: 2.0, a: r(1, 1), p: 1.0 };
        let x = parse_element(&lp, "chi(0,2.5)").unwrap();
        let f = x.as_piecewise().unwrap();
        assert_eq!(f.support_end(), Some(r(5, 2)));
        let y = parse_element(&lp, "2*chi(1/3, 1)").unwrap();
        assert_eq!(y.as_piecewise().unwrap().pieces()[0].lo(), r(1, 3));

        let c0 = Space::TransC0 { w: 2.0, a: r(1, 1) };
        let hat = parse_element(&c0, "ramp").unwrap();
        let h = hat.as_piecewise().unwrap();
        assert_eq!((h.value_at(0.0), h.value_at(0.5)), (1.0, 0.5));
        assert!(parse_element(&c0, "bump(1,3) + ramp(1/2)").is_ok());
        // a jump is rejected in C₀
        assert!(parse_element(&c0, "chi(0,1)").is_err());
        assert!(parse_element(&lp, "1").is_err());
    }

    #[test]
    fn malformed_input() {
        for bad in ["", "1 +", "z^", "chi(0)", "foo", "1 $ 2", "X(1)*z"] {
            assert!(parse_element(&Space::Hardy, bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn scalars() {
        assert_eq!(parse_complex("1 - 3i").unwrap(), Complex64::new(1.0, -3.0));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert!(parse_complex("z").is_err());
    }
}
