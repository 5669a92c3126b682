//! Certificate engines built on the split `uₙ = wₙ + Sⁿ y` with `wₙ ∈ Ker Tⁿ`:
//! since `Tⁿ wₙ = 0` and `Tⁿ Sⁿ = I`, every `uₙ` satisfies `Tⁿ uₙ = y`, and the
//! only question is whether `uₙ` lies in the prescribed open ball.

mod bounds;
mod periodic;

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{predicted_saturation, project};
use crate::math;
use crate::operators::{iterate, step_s, OperatorConfig};
use crate::spaces::{self, BallSpec, Element, TaylorCoeffs};
use crate::{DEFAULT_N_MAX, DEFAULT_TOLERANCE, ZERO_TOLERANCE};

pub use bounds::s_power_bound;
pub use periodic::{periodic_vector_derivative, PeriodicVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineOptions {
    pub n_max: usize,
    pub tolerance: f64,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { n_max: DEFAULT_N_MAX, tolerance: DEFAULT_TOLERANCE }
    }
}

/// How far "for all n ≥ N" is established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMode {
    /// Checked for every `n` in `[N, n_max]` only.
    TestedRange,
    /// A closed-form decay bound covers every `n ≥ N`.
    Analytic,
}

impl BoundMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundMode::TestedRange => "tested_range",
            BoundMode::Analytic => "analytic",
        }
    }
}

/// `Tⁿ uₙ ≈ y` with `uₙ` in the open ball around `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessCertificate {
    pub op: OperatorConfig,
    pub n: usize,
    pub u_n: Element,
    /// `‖Tⁿ uₙ − y‖`.
    pub residual: f64,
    /// `‖uₙ − x‖`.
    pub delta: f64,
    pub radius: f64,
    pub inside: bool,
    pub bound_mode: BoundMode,
}

impl WitnessCertificate {
    pub fn is_valid(&self, tolerance: f64) -> bool {
        self.residual <= tolerance && self.inside && self.delta < self.radius
    }
}

/// Re-derives a certificate from scratch: recomputes `Tⁿ uₙ` through
/// [`iterate`] and the distance to `center`, and checks both strictly.
pub fn verify_certificate(
    cert: &WitnessCertificate,
    target: &Element,
    center: &Element,
    tolerance: f64,
) -> Result<bool> {
    let space = cert.op.space();
    let image = iterate(&cert.op, cert.n, &cert.u_n, false)?.value;
    let residual = spaces::distance(&space, &image, target)?;
    let delta = spaces::distance(&space, &cert.u_n, center)?;
    Ok(residual <= tolerance && delta < cert.radius)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayRow {
    pub n: usize,
    /// `‖Sⁿ x‖`.
    pub s_norm: f64,
    /// `‖y − wₙ‖`.
    pub kernel_gap: f64,
    /// `‖Sⁿ x + wₙ − y‖`.
    pub combined: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayTable {
    pub rows: Vec<DecayRow>,
    pub pass: bool,
}

/// Rows of the hypermixing criterion `Sⁿ x + wₙ → y`, `wₙ ∈ Ker Tⁿ`.
///
/// The verdict passes when the last `combined` value is below the tolerance and
/// `combined` does not increase over the last five rows.
pub fn hm_criterion_table(op: &OperatorConfig, x: &Element, y: &Element, opts: &EngineOptions) -> Result<DecayTable> {
    op.validate()?;
    let space = op.space();
    space.check(x)?;
    space.check(y)?;
    if opts.n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    let mut rows = Vec::with_capacity(opts.n_max);
    let mut s = x.clone();
    for n in 1..=opts.n_max {
        s = step_s(op, &s);
        let w = project(op, y, n);
        let s_norm = spaces::norm(&space, &s)?;
        let kernel_gap = spaces::distance(&space, y, &w)?;
        let combined = spaces::distance(&space, &spaces::add(&s, &w)?, y)?;
        rows.push(DecayRow { n, s_norm, kernel_gap, combined });
    }
    let tail = &rows[rows.len().saturating_sub(5)..];
    let settled = tail.windows(2).all(|w| w[1].combined <= w[0].combined * (1.0 + 1e-9));
    let pass = settled && rows.last().is_some_and(|r| r.combined < opts.tolerance);
    Ok(DecayTable { rows, pass })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witnesses {
    /// Least `N` such that every `n ∈ [N, n_max]` carries a valid certificate.
    pub n_start: usize,
    pub certificates: Vec<WitnessCertificate>,
    pub bound_mode: BoundMode,
    /// `(n, deltaₙ)` for every scanned `n`, including those before `N`.
    pub deltas: Vec<(usize, f64)>,
}

struct Candidate {
    n: usize,
    u: Element,
    residual: f64,
    delta: f64,
}

fn check_ball(op: &OperatorConfig, ball: &BallSpec) -> Result<()> {
    op.validate()?;
    if ball.space != op.space() {
        return Err(Error::SpaceMismatch(format!(
            "ball lives in {} space, operator acts on {}",
            ball.space.name(),
            op.space().name()
        )));
    }
    ball.space.check(&ball.center)?;
    if ball.radius.is_nan() || ball.radius <= 0.0 {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    Ok(())
}

/// `uₙ = w_n(center) + Sⁿ target` for `n = 0..=n_max`, each checked by
/// recomputing `Tⁿ uₙ`.
fn scan(op: &OperatorConfig, center: &Element, target: &Element, n_max: usize) -> Result<Vec<Candidate>> {
    let space = op.space();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut s = target.clone();
    for n in 0..=n_max {
        if n > 0 {
            s = step_s(op, &s);
        }
        let u = spaces::add(&project(op, center, n), &s)?;
        let image = iterate(op, n, &u, false)?.value;
        let residual = spaces::distance(&space, &image, target)?;
        let delta = spaces::distance(&space, &u, center)?;
        out.push(Candidate { n, u, residual, delta });
    }
    Ok(out)
}

fn first_of_tail(valid: &[bool]) -> Option<usize> {
    match valid.iter().rposition(|v| !v) {
        None => Some(0),
        Some(i) if i + 1 < valid.len() => Some(i + 1),
        Some(_) => None,
    }
}

/// Closed-form tail certificate: some `M ∈ [N, n_max]` past the center's
/// saturation index where the nonincreasing bound on `‖Sᴹ y‖` is below the
/// radius.
fn analytic_from(op: &OperatorConfig, center: &Element, target: &Element, n_start: usize, n_max: usize, radius: f64) -> BoundMode {
    let Some(sat) = predicted_saturation(op, center) else {
        return BoundMode::TestedRange;
    };
    for m in n_start.max(sat)..=n_max {
        match s_power_bound(op, target, m) {
            None => return BoundMode::TestedRange,
            Some(b) if b < radius => return BoundMode::Analytic,
            Some(_) => {}
        }
    }
    BoundMode::TestedRange
}

fn certificates(op: &OperatorConfig, radius: f64, cands: Vec<Candidate>, from: usize, mode: BoundMode) -> Vec<WitnessCertificate> {
    cands
        .into_iter()
        .filter(|c| c.n >= from)
        .map(|c| WitnessCertificate {
            op: *op,
            n: c.n,
            inside: c.delta < radius,
            u_n: c.u,
            residual: c.residual,
            delta: c.delta,
            radius,
            bound_mode: mode,
        })
        .collect()
}

/// Hypermixing witnesses: `y ∈ Tⁿ(U)` for every `n ≥ N`.
pub fn hm_witnesses(op: &OperatorConfig, ball: &BallSpec, y: &Element, opts: &EngineOptions) -> Result<Witnesses> {
    check_ball(op, ball)?;
    ball.space.check(y)?;
    let cands = scan(op, &ball.center, y, opts.n_max)?;
    let valid: Vec<bool> = cands
        .iter()
        .map(|c| c.residual <= opts.tolerance && c.delta < ball.radius)
        .collect();
    let deltas: Vec<(usize, f64)> = cands.iter().map(|c| (c.n, c.delta)).collect();
    let Some(n_start) = first_of_tail(&valid) else {
        return Err(Error::NoWitnessInRange { n_max: opts.n_max, deltas });
    };
    let mode = analytic_from(op, &ball.center, y, n_start, opts.n_max, ball.radius);
    Ok(Witnesses {
        n_start,
        certificates: certificates(op, ball.radius, cands, n_start, mode),
        bound_mode: mode,
        deltas,
    })
}

/// Strong transitivity witness: the smallest `n` with `y ∈ Tⁿ(U)`.
pub fn stt_witness(op: &OperatorConfig, ball: &BallSpec, y: &Element, opts: &EngineOptions) -> Result<WitnessCertificate> {
    check_ball(op, ball)?;
    ball.space.check(y)?;
    if y.is_zero(ZERO_TOLERANCE) {
        return Err(Error::InvalidArgument("target must be nonzero; use zero_witness".into()));
    }
    let cands = scan(op, &ball.center, y, opts.n_max)?;
    let deltas = cands.iter().map(|c| (c.n, c.delta)).collect();
    let Some(hit) = cands.iter().position(|c| c.residual <= opts.tolerance && c.delta < ball.radius) else {
        return Err(Error::NoWitnessInRange { n_max: opts.n_max, deltas });
    };
    let n = cands[hit].n;
    Ok(certificates(op, ball.radius, cands, n, BoundMode::TestedRange).swap_remove(0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroWitnesses {
    pub n_start: usize,
    pub certificates: Vec<WitnessCertificate>,
    /// First `n` from which `deltaₙ` is exactly zero through `n_max`.
    pub saturation: Option<usize>,
    pub bound_mode: BoundMode,
}

/// `0 ∈ Tⁿ(U)` for all large `n`, witnessed by `uₙ = wₙ(center) ∈ Ker Tⁿ`.
pub fn zero_witness(op: &OperatorConfig, ball: &BallSpec, opts: &EngineOptions) -> Result<ZeroWitnesses> {
    check_ball(op, ball)?;
    let space = op.space();
    let mut cands = Vec::with_capacity(opts.n_max + 1);
    for n in 0..=opts.n_max {
        let u = project(op, &ball.center, n);
        let image = iterate(op, n, &u, false)?.value;
        let residual = spaces::norm(&space, &image)?;
        let delta = spaces::distance(&space, &u, &ball.center)?;
        cands.push(Candidate { n, u, residual, delta });
    }
    let valid: Vec<bool> = cands
        .iter()
        .map(|c| c.residual <= opts.tolerance && c.delta < ball.radius)
        .collect();
    let Some(n_start) = first_of_tail(&valid) else {
        let deltas = cands.iter().map(|c| (c.n, c.delta)).collect();
        return Err(Error::NoWitnessInRange { n_max: opts.n_max, deltas });
    };
    let exact: Vec<bool> = cands.iter().map(|c| c.delta == 0.0).collect();
    let saturation = first_of_tail(&exact);
    // past saturation the projector returns the center itself for every n
    let mode = match saturation {
        Some(s) if s <= opts.n_max && predicted_saturation(op, &ball.center).is_some_and(|p| p <= opts.n_max) => {
            BoundMode::Analytic
        }
        _ => BoundMode::TestedRange,
    };
    Ok(ZeroWitnesses {
        n_start,
        certificates: certificates(op, ball.radius, cands, n_start, mode),
        saturation,
        bound_mode: mode,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitivityCertificate {
    /// `u ∈ U` with `Tⁿ u = V.center`; `residual` is `‖Tⁿ u − V.center‖`.
    pub witness: WitnessCertificate,
    pub target_radius: f64,
    pub in_target: bool,
}

/// `Tⁿ(U) ∩ V ≠ ∅` for the first possible `n`.
pub fn transitivity_witness(op: &OperatorConfig, u_ball: &BallSpec, v_ball: &BallSpec, opts: &EngineOptions) -> Result<TransitivityCertificate> {
    check_ball(op, u_ball)?;
    check_ball(op, v_ball)?;
    let cands = scan(op, &u_ball.center, &v_ball.center, opts.n_max)?;
    let deltas = cands.iter().map(|c| (c.n, c.delta)).collect();
    let ok = |c: &Candidate| c.residual <= opts.tolerance && c.residual < v_ball.radius && c.delta < u_ball.radius;
    let Some(hit) = cands.iter().position(ok) else {
        return Err(Error::NoWitnessInRange { n_max: opts.n_max, deltas });
    };
    let n = cands[hit].n;
    let witness = certificates(op, u_ball.radius, cands, n, BoundMode::TestedRange).swap_remove(0);
    let in_target = witness.residual < v_ball.radius;
    Ok(TransitivityCertificate { witness, target_radius: v_ball.radius, in_target })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeadingPolynomial {
    pub n: usize,
    pub p: TaylorCoeffs,
    /// `‖pₙ − center‖`.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeadingPolynomials {
    pub n_start: usize,
    pub polys: Vec<LeadingPolynomial>,
    pub bound_mode: BoundMode,
}

/// Polynomials `pₙ ∈ U` of exact degree `n` with leading coefficient `α/n!`,
/// for every `n ≥ N`: `pₙ = (center truncated below degree n) + α zⁿ/n!`.
pub fn leading_polynomials(alpha: Complex64, ball: &BallSpec, opts: &EngineOptions) -> Result<LeadingPolynomials> {
    if alpha.re == 0.0 && alpha.im == 0.0 {
        return Err(Error::InvalidAlpha);
    }
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(Error::InvalidArgument("alpha must be finite".into()));
    }
    let op = OperatorConfig::Derivative;
    check_ball(&op, ball)?;
    let center = ball.center.as_hardy().expect("checked Hardy ball");
    let mut polys = Vec::with_capacity(opts.n_max + 1);
    let mut valid = Vec::with_capacity(opts.n_max + 1);
    for n in 0..=opts.n_max {
        let lead = TaylorCoeffs::monomial(n, alpha / math::factorial_f64(n));
        let p = center.truncate_below(n).add(&lead);
        let delta = p.sub(center).norm();
        valid.push(delta < ball.radius && p.degree() == Some(n));
        polys.push(LeadingPolynomial { n, p, delta });
    }
    let Some(n_start) = first_of_tail(&valid) else {
        let deltas = polys.iter().map(|p| (p.n, p.delta)).collect();
        return Err(Error::NoWitnessInRange { n_max: opts.n_max, deltas });
    };
    let target = Element::Hardy(TaylorCoeffs::monomial(0, alpha));
    let bound_mode = analytic_from(&op, &ball.center, &target, n_start, opts.n_max, ball.radius);
    polys.retain(|p| p.n >= n_start);
    Ok(LeadingPolynomials { n_start, polys, bound_mode })
}

/// Convenience ball constructor for the operator's own space.
pub fn ball(op: &OperatorConfig, center: Element, radius: f64) -> Result<BallSpec> {
    BallSpec::new(op.space(), center, radius)
}
