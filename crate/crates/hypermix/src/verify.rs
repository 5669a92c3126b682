//! The invariant suite behind `hypermix verify`.

use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};

use hypermix_core::dynamics::{self, EngineOptions};
use hypermix_core::kernels::{gk_density_table, is_in_kernel, kernel_project, non_injectivity_witness, predicted_saturation};
use hypermix_core::operators::{apply_s, apply_t, iterate, OperatorConfig};
use hypermix_core::spaces::{self, quadrature::GaussLegendre, BallSpec, Element, NormalizedBivarPoly};
use hypermix_core::{Complex64, Rational64};
use num_bigint::BigUint;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::format;
use crate::random;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub module: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    /// Fixed-width table, one line per check.
    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut s = String::new();
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            writeln!(s, "{mark}  {:<9} {:<width$}  {}", c.module, c.name, c.detail).unwrap();
        }
        writeln!(s, "{} checks, {} failed", self.checks.len(), self.failures()).unwrap();
        s
    }

    fn run(&mut self, module: &'static str, name: impl Into<String>, f: impl FnOnce() -> Result<String, String>) {
        let (passed, detail) = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(Ok(d)) => (true, d),
            Ok(Err(d)) => (false, d),
            Err(_) => (false, "panicked".to_string()),
        };
        self.checks.push(Check { module, name: name.into(), passed, detail });
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// `n!` rounded once to the nearest `f64`.
fn exact_factorial(n: usize) -> f64 {
    let f: BigUint = (1..=n as u64).map(BigUint::from).product();
    f.to_string().parse().expect("decimal integer parses")
}

fn ball_for(rng: &mut ChaCha8Rng, op: &OperatorConfig) -> BallSpec {
    let center = random::element(rng, op);
    BallSpec::new(op.space(), center, rng.gen_range(0.1..1.5)).expect("positive radius")
}

/// Runs every check with `cases` random instances each.
pub fn run_suite(seed: u64, cases: usize) -> Report {
    let mut report = Report::default();
    let mut rng = random::rng(seed);
    let ops = random::operators(&mut rng);

    for op in ops {
        let tag = op.name();
        let mut r = rng.clone();
        report.run("spaces", format!("triangle inequality [{tag}]"), || {
            let space = op.space();
            for _ in 0..cases {
                let (x, y) = (random::element(&mut r, &op), random::element(&mut r, &op));
                let lhs = spaces::norm(&space, &spaces::add(&x, &y).map_err(e2s)?).map_err(e2s)?;
                let rhs = spaces::norm(&space, &x).map_err(e2s)? + spaces::norm(&space, &y).map_err(e2s)?;
                ensure(lhs <= rhs * (1.0 + 1e-9) + 1e-12, || format!("{lhs} > {rhs}"))?;
                let alpha = r.gen_range(-3.0..3.0);
                let scaled = spaces::norm(&space, &spaces::scale(alpha, &x)).map_err(e2s)?;
                let expect = alpha.abs() * spaces::norm(&space, &x).map_err(e2s)?;
                ensure((scaled - expect).abs() <= 1e-9 * (1.0 + expect), || format!("‖αx‖ = {scaled} vs {expect}"))?;
            }
            Ok(format!("{cases} pairs"))
        });
        report.run("spaces", format!("serialization round trip [{tag}]"), || {
            for _ in 0..cases {
                let x = random::element(&mut r, &op);
                let text = serde_json::to_string(&format::element_to_json(&x)).map_err(e2s)?;
                let back = format::element_from_json(&serde_json::from_str(&text).map_err(e2s)?, "").map_err(e2s)?;
                ensure(back == x, || format!("{text} did not round-trip"))?;
            }
            Ok(format!("{cases} elements"))
        });
        report.run("operators", format!("right inverse T(Sf) = f [{tag}]"), || {
            let space = op.space();
            let mut worst: f64 = 0.0;
            for _ in 0..cases {
                let y = random::element(&mut r, &op);
                let back = apply_t(&op, &apply_s(&op, &y).map_err(e2s)?).map_err(e2s)?;
                let err = spaces::distance(&space, &back, &y).map_err(e2s)?;
                worst = worst.max(err);
                ensure(err <= 1e-10, || format!("‖T(Sf) − f‖ = {err}"))?;
            }
            Ok(format!("max error {}", format::report_text(worst)))
        });
        report.run("operators", format!("powers match closed-form weights [{tag}]"), || {
            for _ in 0..cases.min(10) {
                let y = random::element(&mut r, &op);
                for k in [1, 4, 10] {
                    iterate(&op, k, &y, true).map_err(e2s)?;
                    iterate(&op, k, &y, false).map_err(e2s)?;
                }
            }
            Ok("k = 1, 4, 10".into())
        });
        report.run("kernels", format!("projections land in Ker Tⁿ [{tag}]"), || {
            for _ in 0..cases {
                let x = random::element(&mut r, &op);
                let n = r.gen_range(1..=8);
                let w = kernel_project(&op, &x, n).map_err(e2s)?.w_n;
                ensure(is_in_kernel(&op, &w, n).map_err(e2s)?, || format!("projection at n = {n} not in kernel"))?;
            }
            Ok(format!("{cases} projections"))
        });
        report.run("kernels", format!("saturation at predicted index [{tag}]"), || {
            for _ in 0..cases {
                let x = random::element(&mut r, &op);
                let predicted = predicted_saturation(&op, &x).ok_or("no prediction")?;
                let table = gk_density_table(&op, &x, predicted + 4).map_err(e2s)?;
                ensure(table.saturation == Some(predicted), || {
                    format!("saturation {:?}, predicted {predicted}", table.saturation)
                })?;
            }
            Ok(format!("{cases} elements"))
        });
        report.run("kernels", format!("non-injectivity witness [{tag}]"), || {
            let u = non_injectivity_witness(&op);
            ensure(!u.is_zero(0.0), || "witness is zero".into())?;
            let tu = apply_t(&op, &u).map_err(e2s)?;
            ensure(tu.is_zero(1e-12), || "Tu ≠ 0".into())?;
            Ok("Tu = 0 with u ≠ 0".into())
        });
        report.run("dynamics", format!("criterion rows obey triangle inequality [{tag}]"), || {
            for _ in 0..cases.min(10) {
                let (x, y) = (random::element(&mut r, &op), random::element(&mut r, &op));
                let opts = EngineOptions { n_max: 12, ..EngineOptions::default() };
                let t = dynamics::hm_criterion_table(&op, &x, &y, &opts).map_err(e2s)?;
                for row in &t.rows {
                    let bound = row.s_norm + row.kernel_gap;
                    ensure(row.combined <= bound * (1.0 + 1e-9) + 1e-12, || format!("row {}: {} > {bound}", row.n, row.combined))?;
                }
            }
            Ok("combined ≤ s_norm + kernel_gap".into())
        });
        report.run("dynamics", format!("hypermixing certificates re-verify [{tag}]"), || {
            let opts = EngineOptions::default();
            let mut max_n = 0;
            for _ in 0..cases.min(10) {
                let ball = ball_for(&mut r, &op);
                let y = random::element(&mut r, &op);
                let w = dynamics::hm_witnesses(&op, &ball, &y, &opts).map_err(e2s)?;
                max_n = max_n.max(w.n_start);
                for c in &w.certificates {
                    let ok = dynamics::verify_certificate(c, &y, &ball.center, opts.tolerance).map_err(e2s)?;
                    ensure(ok, || format!("certificate at n = {} failed", c.n))?;
                }
            }
            Ok(format!("largest N = {max_n}"))
        });
        report.run("dynamics", format!("zero witnesses saturate [{tag}]"), || {
            for _ in 0..cases.min(10) {
                let ball = ball_for(&mut r, &op);
                let z = dynamics::zero_witness(&op, &ball, &EngineOptions::default()).map_err(e2s)?;
                ensure(z.saturation.is_some(), || "no saturation".into())?;
            }
            Ok("delta reaches 0".into())
        });
        rng = r;
    }

    let mut r = rng.clone();
    report.run("spaces", "Gram norm matches tensor quadrature", || {
        let gl = GaussLegendre::new(24);
        for _ in 0..cases {
            let f = random::bivar(&mut r, 10, 4);
            let eval = |x: f64, y: f64| -> f64 {
                f.terms().map(|((n, l), _)| f.monomial_coeff(n, l) * x.powi(n as i32) * y.powi(l as i32)).sum()
            };
            let quad = gl.integrate(&|x| gl.integrate(&|y| eval(x, y).powi(2), 0.0, 1.0), 0.0, 1.0).sqrt();
            ensure((f.norm() - quad).abs() <= 1e-10 * (1.0 + quad), || format!("{} vs {quad}", f.norm()))?;
        }
        Ok(format!("{cases} polynomials"))
    });
    report.run("operators", "Laplacian inverse exact for n, l ≤ 20", || {
        for n in 0..=20 {
            for l in 0..=20 {
                let b = NormalizedBivarPoly::basis(n, l, 1.0);
                ensure(b.laplacian_inverse().laplacian() == b, || format!("X{n}Y{l}"))?;
            }
        }
        Ok("441 basis elements".into())
    });
    report.run("operators", "integration bound ‖Sⁿf‖ ≤ ‖f‖/n", || {
        for _ in 0..cases {
            let mut f = random::hardy_unit(&mut r, 50);
            for n in 1..=30 {
                f = f.integral();
                ensure(f.norm() <= 1.0 / n as f64 + 1e-12, || format!("n = {n}: {}", f.norm()))?;
            }
        }
        Ok("n = 1..30".into())
    });
    report.run("operators", "translation decay w^{−n(n−1)a/2}", || {
        for &w in &[1.5, 2.0, 4.0] {
            for a in [Rational64::new(1, 2), Rational64::from_integer(1)] {
                let op = OperatorConfig::TranslationLp { w, a, p: 2.0 };
                let af = *a.numer() as f64 / *a.denom() as f64;
                let y = Element::Piecewise(random::piecewise(&mut r, w, 3));
                let norm = spaces::norm(&op.space(), &y).map_err(e2s)?;
                let mut s = y.clone();
                for n in 1..=12 {
                    s = apply_s(&op, &s).map_err(e2s)?;
                    let nf = n as f64;
                    let bound = w.powf(-nf * (nf - 1.0) * af / 2.0) * norm * (1.0 + 1e-8);
                    let actual = spaces::norm(&op.space(), &s).map_err(e2s)?;
                    ensure(actual <= bound, || format!("w = {w}, a = {a}, n = {n}: {actual} > {bound}"))?;
                }
            }
        }
        Ok("n = 1..12".into())
    });
    report.run("dynamics", "leading polynomials exact", || {
        for _ in 0..cases {
            let alpha = Complex64::new(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
            let center = Element::Hardy(random::hardy(&mut r, 6));
            let ball = BallSpec::new(spaces::Space::Hardy, center, r.gen_range(0.05..1.0)).map_err(e2s)?;
            let lp = dynamics::leading_polynomials(alpha, &ball, &EngineOptions::default()).map_err(e2s)?;
            for p in &lp.polys {
                let fact = exact_factorial(p.n);
                ensure(p.p.degree() == Some(p.n), || format!("degree of p_{} is {:?}", p.n, p.p.degree()))?;
                ensure(p.p.coeff(p.n) == alpha / fact, || format!("leading coefficient of p_{}", p.n))?;
                ensure(p.delta < ball.radius, || format!("p_{} outside the ball", p.n))?;
            }
        }
        let zero = dynamics::leading_polynomials(
            Complex64::new(0.0, 0.0),
            &BallSpec::new(spaces::Space::Hardy, spaces::Space::Hardy.zero(), 1.0).map_err(e2s)?,
            &EngineOptions::default(),
        );
        ensure(zero.is_err(), || "alpha = 0 accepted".into())?;
        Ok(format!("{cases} pairs"))
    });
    report.run("dynamics", "periodic defect ≤ 2/(M−N+1)!", || {
        for period in 1..=4 {
            let v = dynamics::periodic_vector_derivative(period, 30, 1).map_err(e2s)?;
            let ln_bound = 2f64.ln() - (1..=31 - period).map(|k| (k as f64).ln()).sum::<f64>();
            ensure(v.ln_defect <= ln_bound, || format!("N = {period}: ln defect {} > {ln_bound}", v.ln_defect))?;
            let shorter = dynamics::periodic_vector_derivative(period, 29, 1).map_err(e2s)?;
            ensure(v.ln_defect < shorter.ln_defect, || format!("N = {period}: not decreasing in M"))?;
        }
        Ok("N = 1..4, M = 30".into())
    });
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_and_is_deterministic() {
        let a = run_suite(5, 4);
        assert_eq!(a.failures(), 0, "{}", a.table());
        assert_eq!(a.table(), run_suite(5, 4).table());
    }
}
