//! JSON encodings of elements, operators and certificates.
//!
//! Objects are emitted with sorted keys. Report quantities (norms, residuals,
//! table columns) are rounded to 12 significant digits; element coefficients
//! keep full precision so that serialized elements parse back to equal values.

use hypermix_core::dynamics::{BoundMode, LeadingPolynomials, PeriodicVector, WitnessCertificate, ZeroWitnesses};
use hypermix_core::dynamics::{DecayTable, TransitivityCertificate, Witnesses};
use hypermix_core::kernels::DensityTable;
use hypermix_core::operators::OperatorConfig;
use hypermix_core::spaces::{Element, ExpTerm, NormalizedBivarPoly, Piece, PiecewiseExpPoly, TaylorCoeffs};
use hypermix_core::{Complex64, Rational64};
use serde_json::{json, Map, Value};

/// A malformed input, located by a JSON-pointer-like field path.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct FormatError {
    pub path: String,
    pub message: String,
}

impl FormatError {
    pub fn new(path: &str, message: impl Into<String>) -> Self {
        FormatError { path: path.to_string(), message: message.into() }
    }
}

type Result<T> = std::result::Result<T, FormatError>;

/// Rounds to 12 significant digits; non-finite values become `null`.
pub fn report(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    json!(rounded)
}

/// The same rounding as [`report`], as text for CSV cells.
pub fn report_text(x: f64) -> String {
    match report(x) {
        Value::Null => "NaN".to_string(),
        v => v.to_string(),
    }
}

fn exact(x: f64) -> Value {
    json!(x)
}

fn rational(r: Rational64) -> Value {
    Value::String(r.to_string())
}

pub fn element_to_json(x: &Element) -> Value {
    match x {
        Element::Hardy(f) => json!({
            "kind": "hardy",
            "coeffs": f.coeffs().iter().map(|c| json!([exact(c.re), exact(c.im)])).collect::<Vec<_>>(),
        }),
        Element::Bivar(f) => json!({
            "kind": "bivar",
            "terms": f.terms().map(|((n, l), c)| json!({"n": n, "l": l, "c": exact(c)})).collect::<Vec<_>>(),
        }),
        Element::Piecewise(f) => json!({
            "kind": "piecewise",
            "base": exact(f.base()),
            "pieces": f.pieces().iter().map(piece_to_json).collect::<Vec<_>>(),
        }),
    }
}

fn piece_to_json(p: &Piece) -> Value {
    json!({
        "lo": rational(p.lo()),
        "hi": rational(p.hi()),
        "scale": rational(p.scale()),
        "terms": p.terms().iter().map(|t| json!({"c": exact(t.coeff), "d": t.degree, "q": rational(t.rate)})).collect::<Vec<_>>(),
    })
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| FormatError::new(path, format!("missing field `{key}`")))
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| FormatError::new(path, "expected an object"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| FormatError::new(path, "expected an array"))
}

pub fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| FormatError::new(path, "expected a number"))
}

pub fn unsigned(v: &Value, path: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| FormatError::new(path, "expected a nonnegative integer"))
}

/// A rational given as `"p/q"`, `"p"`, an integer, or a terminating decimal.
pub fn parse_rational(v: &Value, path: &str) -> Result<Rational64> {
    match v {
        Value::String(s) => rational_from_str(s).ok_or_else(|| FormatError::new(path, format!("bad rational `{s}`"))),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational64::from_integer(i))
            } else {
                rational_from_str(&n.to_string()).ok_or_else(|| FormatError::new(path, format!("bad rational {n}")))
            }
        }
        _ => Err(FormatError::new(path, "expected a rational")),
    }
}

/// Parses `p/q`, integers and decimals such as `2.5` exactly.
pub fn rational_from_str(s: &str) -> Option<Rational64> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let (p, q): (i64, i64) = (p.trim().parse().ok()?, q.trim().parse().ok()?);
        return (q != 0).then(|| Rational64::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !(int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())) {
        return None;
    }
    let digits: i64 = format!("{int}{frac}").parse().ok()?;
    let den = 10i64.checked_pow(frac.len() as u32)?;
    let r = Rational64::new(digits, den);
    Some(if neg { -r } else { r })
}

pub fn element_from_json(v: &Value, path: &str) -> Result<Element> {
    let obj = object(v, path)?;
    let kind = field(obj, "kind", path)?
        .as_str()
        .ok_or_else(|| FormatError::new(&format!("{path}/kind"), "expected a string"))?;
    let malformed = |p: &str, e: hypermix_core::Error| FormatError::new(p, e.to_string());
    match kind {
        "hardy" => {
            let p = format!("{path}/coeffs");
            let mut coeffs = Vec::new();
            for (i, c) in array(field(obj, "coeffs", path)?, &p)?.iter().enumerate() {
                let cp = format!("{p}/{i}");
                let pair = array(c, &cp)?;
                if pair.len() != 2 {
                    return Err(FormatError::new(&cp, "expected [re, im]"));
                }
                coeffs.push(Complex64::new(number(&pair[0], &cp)?, number(&pair[1], &cp)?));
            }
            TaylorCoeffs::new(coeffs).map(Element::Hardy).map_err(|e| malformed(&p, e))
        }
        "bivar" => {
            let p = format!("{path}/terms");
            let mut terms = Vec::new();
            for (i, t) in array(field(obj, "terms", path)?, &p)?.iter().enumerate() {
                let tp = format!("{p}/{i}");
                let t = object(t, &tp)?;
                let n = unsigned(field(t, "n", &tp)?, &format!("{tp}/n"))?;
                let l = unsigned(field(t, "l", &tp)?, &format!("{tp}/l"))?;
                let c = number(field(t, "c", &tp)?, &format!("{tp}/c"))?;
                let n = u32::try_from(n).map_err(|_| FormatError::new(&format!("{tp}/n"), "index too large"))?;
                let l = u32::try_from(l).map_err(|_| FormatError::new(&format!("{tp}/l"), "index too large"))?;
                terms.push(((n, l), c));
            }
            NormalizedBivarPoly::new(terms).map(Element::Bivar).map_err(|e| malformed(&p, e))
        }
        "piecewise" => {
            let base = number(field(obj, "base", path)?, &format!("{path}/base"))?;
            let p = format!("{path}/pieces");
            let mut pieces = Vec::new();
            for (i, piece) in array(field(obj, "pieces", path)?, &p)?.iter().enumerate() {
                let pp = format!("{p}/{i}");
                let o = object(piece, &pp)?;
                let lo = parse_rational(field(o, "lo", &pp)?, &format!("{pp}/lo"))?;
                let hi = parse_rational(field(o, "hi", &pp)?, &format!("{pp}/hi"))?;
                let scale = match o.get("scale") {
                    Some(s) => parse_rational(s, &format!("{pp}/scale"))?,
                    None => Rational64::from_integer(0),
                };
                let tp = format!("{pp}/terms");
                let mut terms = Vec::new();
                for (j, t) in array(field(o, "terms", &pp)?, &tp)?.iter().enumerate() {
                    let jp = format!("{tp}/{j}");
                    let t = object(t, &jp)?;
                    let c = number(field(t, "c", &jp)?, &format!("{jp}/c"))?;
                    let d = match t.get("d") {
                        Some(d) => unsigned(d, &format!("{jp}/d"))?,
                        None => 0,
                    };
                    let q = match t.get("q") {
                        Some(q) => parse_rational(q, &format!("{jp}/q"))?,
                        None => Rational64::from_integer(0),
                    };
                    let d = u32::try_from(d).map_err(|_| FormatError::new(&format!("{jp}/d"), "degree too large"))?;
                    terms.push(ExpTerm::new(c, d, q));
                }
                pieces.push(Piece::new(lo, hi, terms).with_scale(scale));
            }
            PiecewiseExpPoly::new(base, pieces).map(Element::Piecewise).map_err(|e| malformed(&p, e))
        }
        other => Err(FormatError::new(&format!("{path}/kind"), format!("unknown element kind `{other}`"))),
    }
}

pub fn op_to_json(op: &OperatorConfig) -> Value {
    match *op {
        OperatorConfig::Derivative | OperatorConfig::Laplacian => json!({"name": op.name()}),
        OperatorConfig::TranslationLp { w, a, p } => {
            json!({"name": op.name(), "w": exact(w), "a": rational(a), "p": exact(p)})
        }
        OperatorConfig::TranslationC0 { w, a } => json!({"name": op.name(), "w": exact(w), "a": rational(a)}),
    }
}

/// Builds an operator from its name and the translation parameters.
pub fn op_from_parts(name: &str, w: Option<f64>, a: Option<Rational64>, p: Option<f64>, path: &str) -> Result<OperatorConfig> {
    let need_w = || w.ok_or_else(|| FormatError::new(path, format!("`{name}` needs w")));
    let need_a = || a.ok_or_else(|| FormatError::new(path, format!("`{name}` needs a")));
    let op = match name {
        "derivative" => OperatorConfig::Derivative,
        "laplacian" => OperatorConfig::Laplacian,
        "translation-lp" => OperatorConfig::TranslationLp { w: need_w()?, a: need_a()?, p: p.unwrap_or(2.0) },
        "translation-c0" => OperatorConfig::TranslationC0 { w: need_w()?, a: need_a()? },
        other => return Err(FormatError::new(path, format!("unknown operator `{other}`"))),
    };
    op.validate().map_err(|e| FormatError::new(path, e.to_string()))?;
    Ok(op)
}

pub fn op_from_json(v: &Value, path: &str) -> Result<OperatorConfig> {
    if let Some(name) = v.as_str() {
        return op_from_parts(name, None, None, None, path);
    }
    let obj = object(v, path)?;
    let name = field(obj, "name", path)?
        .as_str()
        .ok_or_else(|| FormatError::new(&format!("{path}/name"), "expected a string"))?;
    let w = obj.get("w").map(|w| number(w, &format!("{path}/w"))).transpose()?;
    let a = obj.get("a").map(|a| parse_rational(a, &format!("{path}/a"))).transpose()?;
    let p = obj.get("p").map(|p| number(p, &format!("{path}/p"))).transpose()?;
    op_from_parts(name, w, a, p, path)
}

fn bound_mode(mode: BoundMode) -> Value {
    Value::String(mode.as_str().to_string())
}

pub fn certificate_to_json(c: &WitnessCertificate) -> Value {
    json!({
        "op": op_to_json(&c.op),
        "n": c.n,
        "u_n": element_to_json(&c.u_n),
        "residual": report(c.residual),
        "delta": report(c.delta),
        "radius": report(c.radius),
        "inside": c.inside,
        "bound_mode": bound_mode(c.bound_mode),
    })
}

pub fn witnesses_to_json(w: &Witnesses) -> Value {
    json!({
        "N": w.n_start,
        "bound_mode": bound_mode(w.bound_mode),
        "certificates": w.certificates.iter().map(certificate_to_json).collect::<Vec<_>>(),
    })
}

pub fn zero_witnesses_to_json(w: &ZeroWitnesses) -> Value {
    json!({
        "N": w.n_start,
        "saturation": w.saturation,
        "bound_mode": bound_mode(w.bound_mode),
        "certificates": w.certificates.iter().map(certificate_to_json).collect::<Vec<_>>(),
    })
}

pub fn transitivity_to_json(t: &TransitivityCertificate) -> Value {
    let mut v = certificate_to_json(&t.witness);
    let obj = v.as_object_mut().expect("certificate is an object");
    obj.insert("target_radius".into(), report(t.target_radius));
    obj.insert("in_target".into(), json!(t.in_target));
    v
}

pub fn leading_to_json(alpha: Complex64, lp: &LeadingPolynomials) -> Value {
    json!({
        "alpha": [exact(alpha.re), exact(alpha.im)],
        "N": lp.n_start,
        "bound_mode": bound_mode(lp.bound_mode),
        "polynomials": lp.polys.iter().map(|p| {
            let lead = p.p.coeff(p.n);
            json!({
                "n": p.n,
                "p_n": element_to_json(&Element::Hardy(p.p.clone())),
                "leading": [exact(lead.re), exact(lead.im)],
                "delta": report(p.delta),
            })
        }).collect::<Vec<_>>(),
    })
}

pub fn periodic_to_json(v: &PeriodicVector) -> Value {
    json!({
        "period": v.period,
        "truncation": v.truncation,
        "lambda": [report(v.lambda.re), report(v.lambda.im)],
        "f": element_to_json(&Element::Hardy(v.f.clone())),
        "defect": report(v.defect),
        "ln_defect": report(v.ln_defect),
    })
}

pub fn decay_to_json(t: &DecayTable) -> Value {
    json!({
        "pass": t.pass,
        "rows": t.rows.iter().map(|r| json!({
            "n": r.n,
            "s_norm": report(r.s_norm),
            "kernel_gap": report(r.kernel_gap),
            "combined": report(r.combined),
        })).collect::<Vec<_>>(),
    })
}

pub fn density_to_json(t: &DensityTable) -> Value {
    json!({
        "saturation": t.saturation,
        "rows": t.rows.iter().map(|r| json!({"n": r.n, "gap": report(r.gap), "saturated": r.saturated})).collect::<Vec<_>>(),
    })
}

pub fn no_witness_to_json(n_max: usize, deltas: &[(usize, f64)]) -> Value {
    json!({
        "error": "NO_WITNESS_IN_RANGE",
        "n_max": n_max,
        "deltas": deltas.iter().map(|&(n, d)| json!({"n": n, "delta": report(d)})).collect::<Vec<_>>(),
    })
}

/// Pretty-printed with a trailing newline.
pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(report(1.0 / 3.0).to_string(), "0.333333333333");
        assert_eq!(report(1.0 / 6.0).to_string(), "0.166666666667");
        assert_eq!(report(0.5).to_string(), "0.5");
        assert_eq!(report(f64::NAN), Value::Null);
    }

    #[test]
    fn rationals() {
        let r = |p, q| Rational64::new(p, q);
        assert_eq!(rational_from_str("2.5"), Some(r(5, 2)));
        assert_eq!(rational_from_str("-0.25"), Some(r(-1, 4)));
        assert_eq!(rational_from_str("3/6"), Some(r(1, 2)));
        assert_eq!(rational_from_str("7"), Some(r(7, 1)));
        assert_eq!(rational_from_str("1/0"), None);
        assert_eq!(rational_from_str("x"), None);
        assert_eq!(rational_from_str("."), None);
    }

    #[test]
    fn elements_round_trip() {
        let r = Rational64::new;
        let piece = Piece::new(r(1, 2), r(3, 1), vec![ExpTerm::new(0.1, 2, r(-1, 3))]).with_scale(r(7, 4));
        let cases = [
            Element::Hardy(TaylorCoeffs::new(vec![Complex64::new(0.1, -2.0), Complex64::new(1.0 / 3.0, 0.0)]).unwrap()),
            Element::Bivar(NormalizedBivarPoly::new([((0, 3), 1e-300), ((2, 1), -0.7)]).unwrap()),
            Element::Piecewise(PiecewiseExpPoly::new(1.5, vec![piece]).unwrap()),
        ];
        for x in cases {
            let text = serde_json::to_string(&element_to_json(&x)).unwrap();
            let back = element_from_json(&serde_json::from_str(&text).unwrap(), "").unwrap();
            assert_eq!(back, x);
        }
    }

    #[test]
    fn errors_carry_paths() {
        let v = json!({"kind": "piecewise", "base": 2.0, "pieces": [{"lo": "0", "hi": "1", "terms": [{"c": "one"}]}]});
        let e = element_from_json(&v, "/center").unwrap_err();
        assert_eq!(e.path, "/center/pieces/0/terms/0/c");
        let e = op_from_json(&json!({"name": "translation-lp", "w": 2.0}), "/op").unwrap_err();
        assert_eq!(e.path, "/op");
    }
}
