//! Executes descriptors and renders their artifacts.

use hypermix_core::dynamics::{self, EngineOptions};
use hypermix_core::kernels::gk_density_table;
use hypermix_core::operators::OperatorConfig;
use hypermix_core::spaces::{BallSpec, Element, Space};
use hypermix_core::Error;
use serde_json::Value;

use crate::descriptor::{Command, Descriptor, ElementInput, OutputFormat};
use crate::expr;
use crate::format::{self, report_text, FormatError};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MALFORMED: i32 = 1;
pub const EXIT_NO_CERTIFICATE: i32 = 2;

/// The artifact text and the process exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub body: String,
    pub exit: i32,
    /// One-line human summary for the terminal.
    pub summary: String,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Engine(#[from] Error),
    #[error("{0}")]
    Csv(String),
}

impl From<csv::Error> for RunError {
    fn from(e: csv::Error) -> Self {
        RunError::Csv(e.to_string())
    }
}

type Result<T> = std::result::Result<T, RunError>;

fn need<'a, T>(v: &'a Option<T>, name: &str) -> std::result::Result<&'a T, FormatError> {
    v.as_ref().ok_or_else(|| FormatError::new(&format!("/inputs/{name}"), "missing input"))
}

fn element(input: &Option<ElementInput>, name: &str, space: &Space) -> std::result::Result<Element, FormatError> {
    need(input, name)?.resolve(space, &format!("/inputs/{name}"))
}

fn ball(op: &OperatorConfig, d: &Descriptor, center: &str, radius: &str) -> Result<BallSpec> {
    let space = op.space();
    let (c, r) = if center == "center" {
        (&d.inputs.center, d.inputs.radius)
    } else {
        (&d.inputs.target, d.inputs.target_radius)
    };
    let c = element(c, center, &space)?;
    let r = *need(&r, radius)?;
    BallSpec::new(space, c, r).map_err(|e| FormatError::new(&format!("/inputs/{radius}"), e.to_string()).into())
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| RunError::Csv(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn certificate_rows(certs: &[dynamics::WitnessCertificate]) -> Vec<Vec<String>> {
    certs
        .iter()
        .map(|c| {
            vec![
                c.n.to_string(),
                report_text(c.residual),
                report_text(c.delta),
                report_text(c.radius),
                c.inside.to_string(),
                c.bound_mode.as_str().to_string(),
            ]
        })
        .collect()
}

const CERT_HEADER: [&str; 6] = ["n", "residual", "delta", "radius", "inside", "bound_mode"];

fn render(d: &Descriptor, json: Value, csv: impl FnOnce() -> Result<String>) -> Result<String> {
    match d.format() {
        OutputFormat::Json => Ok(format::to_text(&json)),
        OutputFormat::Csv => csv(),
    }
}

fn no_witness(n_max: usize, deltas: &[(usize, f64)]) -> Outcome {
    let last = deltas.last().map(|&(_, d)| report_text(d)).unwrap_or_default();
    Outcome {
        body: format::to_text(&format::no_witness_to_json(n_max, deltas)),
        exit: EXIT_NO_CERTIFICATE,
        summary: format!("NO_WITNESS_IN_RANGE up to n = {n_max} (last delta {last})"),
    }
}

/// Runs one descriptor. Malformed input and engine errors come back as `Err`;
/// a missing certificate is an `Outcome` with exit status 2.
pub fn run(d: &Descriptor) -> Result<Outcome> {
    d.validate()?;
    let opts = EngineOptions { n_max: d.n_max, tolerance: d.tolerance };
    let op = d.op;
    let op_ref = || op.as_ref().ok_or_else(|| RunError::from(FormatError::new("/op", "missing operator")));
    let result = match d.command {
        Command::Decay => {
            let op = op_ref()?;
            let space = op.space();
            let x = element(&d.inputs.x, "x", &space)?;
            let y = element(&d.inputs.y, "y", &space)?;
            let table = dynamics::hm_criterion_table(op, &x, &y, &opts)?;
            let body = render(d, format::decay_to_json(&table), || {
                csv_text(
                    &["n", "s_norm", "kernel_gap", "combined"],
                    table.rows.iter().map(|r| {
                        vec![r.n.to_string(), report_text(r.s_norm), report_text(r.kernel_gap), report_text(r.combined)]
                    }),
                )
            })?;
            let verdict = if table.pass { "PASS" } else { "FAIL" };
            let last = table.rows.last().map(|r| report_text(r.combined)).unwrap_or_default();
            Outcome {
                body,
                exit: if table.pass { EXIT_OK } else { EXIT_NO_CERTIFICATE },
                summary: format!("{verdict}: combined({}) = {last}", d.n_max),
            }
        }
        Command::WitnessHm => {
            let op = op_ref()?;
            let b = ball(op, d, "center", "radius")?;
            let y = element(&d.inputs.target, "target", &op.space())?;
            match dynamics::hm_witnesses(op, &b, &y, &opts) {
                Ok(w) => Outcome {
                    body: render(d, format::witnesses_to_json(&w), || csv_text(&CERT_HEADER, certificate_rows(&w.certificates)))?,
                    exit: EXIT_OK,
                    summary: format!("N = {} ({})", w.n_start, w.bound_mode.as_str()),
                },
                Err(Error::NoWitnessInRange { n_max, deltas }) => no_witness(n_max, &deltas),
                Err(e) => return Err(e.into()),
            }
        }
        Command::WitnessStt => {
            let op = op_ref()?;
            let b = ball(op, d, "center", "radius")?;
            let y = element(&d.inputs.target, "target", &op.space())?;
            match dynamics::stt_witness(op, &b, &y, &opts) {
                Ok(c) => Outcome {
                    body: render(d, format::certificate_to_json(&c), || {
                        csv_text(&CERT_HEADER, certificate_rows(std::slice::from_ref(&c)))
                    })?,
                    exit: EXIT_OK,
                    summary: format!("n = {}, delta = {}", c.n, report_text(c.delta)),
                },
                Err(Error::NoWitnessInRange { n_max, deltas }) => no_witness(n_max, &deltas),
                Err(e) => return Err(e.into()),
            }
        }
        Command::WitnessZero => {
            let op = op_ref()?;
            let b = ball(op, d, "center", "radius")?;
            match dynamics::zero_witness(op, &b, &opts) {
                Ok(z) => Outcome {
                    body: render(d, format::zero_witnesses_to_json(&z), || {
                        csv_text(&CERT_HEADER, certificate_rows(&z.certificates))
                    })?,
                    exit: EXIT_OK,
                    summary: format!("N = {} ({})", z.n_start, z.bound_mode.as_str()),
                },
                Err(Error::NoWitnessInRange { n_max, deltas }) => no_witness(n_max, &deltas),
                Err(e) => return Err(e.into()),
            }
        }
        Command::WitnessTransitivity => {
            let op = op_ref()?;
            let u = ball(op, d, "center", "radius")?;
            let v = ball(op, d, "target", "target_radius")?;
            match dynamics::transitivity_witness(op, &u, &v, &opts) {
                Ok(t) => Outcome {
                    body: render(d, format::transitivity_to_json(&t), || {
                        csv_text(&CERT_HEADER, certificate_rows(std::slice::from_ref(&t.witness)))
                    })?,
                    exit: EXIT_OK,
                    summary: format!("n = {}, delta = {}", t.witness.n, report_text(t.witness.delta)),
                },
                Err(Error::NoWitnessInRange { n_max, deltas }) => no_witness(n_max, &deltas),
                Err(e) => return Err(e.into()),
            }
        }
        Command::LeadingPoly => {
            let alpha = expr::parse_complex(need(&d.inputs.alpha, "alpha")?)
                .map_err(|e| FormatError::new("/inputs/alpha", e.to_string()))?;
            let b = ball(&OperatorConfig::Derivative, d, "center", "radius")?;
            match dynamics::leading_polynomials(alpha, &b, &opts) {
                Ok(lp) => Outcome {
                    body: render(d, format::leading_to_json(alpha, &lp), || {
                        csv_text(
                            &["n", "delta", "leading_re", "leading_im"],
                            lp.polys.iter().map(|p| {
                                let c = p.p.coeff(p.n);
                                vec![p.n.to_string(), report_text(p.delta), format!("{:?}", c.re), format!("{:?}", c.im)]
                            }),
                        )
                    })?,
                    exit: EXIT_OK,
                    summary: format!("N = {} ({})", lp.n_start, lp.bound_mode.as_str()),
                },
                Err(Error::NoWitnessInRange { n_max, deltas }) => no_witness(n_max, &deltas),
                Err(Error::InvalidAlpha) => {
                    return Err(FormatError::new("/inputs/alpha", "alpha must be nonzero").into())
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Periodic => {
            let period = *need(&d.inputs.period, "period")?;
            let truncation = *need(&d.inputs.truncation, "truncation")?;
            let root = d.inputs.root.unwrap_or(1);
            let v = dynamics::periodic_vector_derivative(period, truncation, root)?;
            Outcome {
                body: render(d, format::periodic_to_json(&v), || {
                    csv_text(
                        &["k", "re", "im"],
                        v.f.coeffs().iter().enumerate().map(|(k, c)| vec![k.to_string(), format!("{:?}", c.re), format!("{:?}", c.im)]),
                    )
                })?,
                exit: EXIT_OK,
                summary: format!("defect = {}", report_text(v.defect)),
            }
        }
        Command::Density => {
            let op = op_ref()?;
            let x = element(&d.inputs.x, "x", &op.space())?;
            let t = gk_density_table(op, &x, d.n_max)?;
            Outcome {
                body: render(d, format::density_to_json(&t), || {
                    csv_text(
                        &["n", "gap", "saturated"],
                        t.rows.iter().map(|r| vec![r.n.to_string(), report_text(r.gap), r.saturated.to_string()]),
                    )
                })?,
                exit: EXIT_OK,
                summary: match t.saturation {
                    Some(s) => format!("saturated at n = {s}"),
                    None => format!("not saturated by n = {}", d.n_max),
                },
            }
        }
        Command::Verify => {
            let report = verify::run_suite(d.seed, d.cases);
            let failed = report.failures();
            Outcome {
                body: report.table(),
                exit: if failed == 0 { EXIT_OK } else { EXIT_NO_CERTIFICATE },
                summary: format!("{} checks, {failed} failed", report.checks.len()),
            }
        }
    };
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::Inputs;
    use hypermix_core::Rational64;

    fn hm(radius: f64) -> Descriptor {
        let mut d = Descriptor::new(Command::WitnessHm);
        d.op = Some(OperatorConfig::Derivative);
        d.n_max = 10;
        d.inputs = Inputs {
            center: Some(ElementInput::Expr("0".into())),
            radius: Some(radius),
            target: Some(ElementInput::Expr("1".into())),
            ..Inputs::default()
        };
        d
    }

    #[test]
    fn hm_example() {
        let out = run(&hm(0.5)).unwrap();
        assert_eq!(out.exit, EXIT_OK);
        let v: Value = serde_json::from_str(&out.body).unwrap();
        assert_eq!(v["N"], 3);
        assert_eq!(v["certificates"][0]["delta"].as_f64(), Some(0.166666666667));
    }

    #[test]
    fn missing_certificate_exits_two() {
        let out = run(&hm(1e-12)).unwrap();
        assert_eq!(out.exit, EXIT_NO_CERTIFICATE);
        assert!(out.body.contains("NO_WITNESS_IN_RANGE"));
    }

    #[test]
    fn decay_example_csv() {
        let mut d = Descriptor::new(Command::Decay);
        d.op = Some(OperatorConfig::TranslationLp { w: 2.0, a: Rational64::from_integer(1), p: 1.0 });
        d.n_max = 8;
        d.inputs.x = Some(ElementInput::Expr("chi(0,1)".into()));
        d.inputs.y = Some(ElementInput::Expr("0".into()));
        let out = run(&d).unwrap();
        let mut lines = out.body.lines();
        assert_eq!(lines.next(), Some("n,s_norm,kernel_gap,combined"));
        for (n, line) in lines.enumerate() {
            let s_norm: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            let n = (n + 1) as f64;
            assert!(s_norm <= 2f64.powf(-n * (n - 1.0) / 2.0));
        }
    }

    #[test]
    fn missing_inputs_are_malformed() {
        let mut d = hm(0.5);
        d.inputs.target = None;
        match run(&d) {
            Err(RunError::Format(e)) => assert_eq!(e.path, "/inputs/target"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
