use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use hypermix::descriptor::{Command, Descriptor, ElementInput, OutputFormat};
use hypermix::format::{self, op_from_parts};
use hypermix::run::{self, RunError, EXIT_MALFORMED};

const ELEMENT_HELP: &str = "\
Element literals:
  Taylor series      1 + 2*z^3, 2i*z - 0.5, z*z
  bivariate          X(1)Y(1) - 3*X(2) + 1     (Xn Yl = x^n y^l / (n! l!))
  half line          chi(0,2.5)  indicator of [0, 5/2)
                     ramp, ramp(1/2)   1 - t/h on [0, h)
                     bump(1,3)   (t-1)(3-t) on [1, 3)
  zero               0
Breakpoints are exact rationals: 2.5 and 5/2 are the same point.
Elements may also be given as serialized JSON objects inside descriptors.

Exit status: 0 on success, 1 on malformed input, 2 when no certificate is
found in range or a decay verdict fails.";

#[derive(Parser, Debug)]
#[command(name = "hypermix", version, about = "Witness certificates for hypermixing unbounded operators")]
#[command(after_long_help = ELEMENT_HELP)]
struct Cli {
    /// Run the experiment descriptor in this JSON file.
    #[arg(long, global = true, value_name = "FILE")]
    from_file: Option<PathBuf>,

    /// Write the artifact here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Artifact format: json or csv.
    #[arg(long, global = true, value_name = "FORMAT")]
    format: Option<OutputFormat>,

    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Args, Debug, Clone)]
struct OpArgs {
    /// derivative, laplacian, translation-lp or translation-c0.
    #[arg(long)]
    op: String,
    /// Weight base w > 1 of the translations.
    #[arg(long)]
    w: Option<f64>,
    /// Translation step a > 0, a rational such as 1/2.
    #[arg(long)]
    a: Option<String>,
    /// Exponent p >= 1 of L_p (default 2).
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct EngineArgs {
    /// Largest power scanned.
    #[arg(long, default_value_t = hypermix_core::DEFAULT_N_MAX)]
    n_max: usize,
    /// Residual tolerance.
    #[arg(long, default_value_t = hypermix_core::DEFAULT_TOLERANCE)]
    tolerance: f64,
}

#[derive(Args, Debug, Clone)]
struct BallArgs {
    /// Center of the open ball U.
    #[arg(long)]
    center: String,
    /// Radius of U.
    #[arg(long)]
    radius: f64,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Table of ‖Sⁿx‖, ‖y − wₙ‖ and ‖Sⁿx + wₙ − y‖ with a PASS/FAIL verdict.
    Decay {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Hypermixing witnesses: y ∈ Tⁿ(U) for every n ≥ N.
    WitnessHm {
        #[command(flatten)]
        op: OpArgs,
        #[command(flatten)]
        ball: BallArgs,
        /// The element y to reach.
        #[arg(long)]
        target: String,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// The first n with y ∈ Tⁿ(U).
    WitnessStt {
        #[command(flatten)]
        op: OpArgs,
        #[command(flatten)]
        ball: BallArgs,
        #[arg(long)]
        target: String,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Witnesses of 0 ∈ Tⁿ(U) for every n ≥ N.
    WitnessZero {
        #[command(flatten)]
        op: OpArgs,
        #[command(flatten)]
        ball: BallArgs,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// The first n with Tⁿ(U) ∩ V nonempty.
    WitnessTransitivity {
        #[command(flatten)]
        op: OpArgs,
        #[command(flatten)]
        ball: BallArgs,
        /// Center of V.
        #[arg(long)]
        target: String,
        /// Radius of V.
        #[arg(long)]
        target_radius: f64,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Polynomials pₙ ∈ U of degree n with leading coefficient α/n!.
    LeadingPoly {
        /// Nonzero complex α, e.g. 2 or 1-3i.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[command(flatten)]
        ball: BallArgs,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Truncated periodic vector of the derivative and its defect ‖Dᴺf − f‖.
    Periodic {
        /// Period N.
        #[arg(long)]
        period: usize,
        /// Truncation degree M >= N.
        #[arg(long)]
        truncation: usize,
        /// Use λ = exp(2πi·root/N).
        #[arg(long, default_value_t = 1)]
        root: usize,
    },
    /// Generalized-kernel density table ‖x − wₙ‖ for n = 1..n_max.
    Density {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long)]
        x: String,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Run the invariant suite and print a pass/fail table.
    Verify {
        #[arg(long, default_value_t = hypermix::descriptor::DEFAULT_SEED)]
        seed: u64,
        /// Random instances per check.
        #[arg(long, default_value_t = hypermix::descriptor::DEFAULT_CASES)]
        cases: usize,
    },
}

fn expr(s: &str) -> Option<ElementInput> {
    Some(ElementInput::Expr(s.to_string()))
}

fn with_op(command: Command, op: &OpArgs, engine: &EngineArgs) -> anyhow::Result<Descriptor> {
    let a = op
        .a
        .as_deref()
        .map(|s| format::rational_from_str(s).with_context(|| format!("--a: bad rational `{s}`")))
        .transpose()?;
    let mut d = Descriptor::new(command);
    d.op = Some(op_from_parts(&op.op, op.w, a, op.p, "--op")?);
    d.n_max = engine.n_max;
    d.tolerance = engine.tolerance;
    Ok(d)
}

fn reach(command: Command, op: &OpArgs, ball: &BallArgs, target: &str, engine: &EngineArgs) -> anyhow::Result<Descriptor> {
    let mut d = with_op(command, op, engine)?;
    d.inputs.center = expr(&ball.center);
    d.inputs.radius = Some(ball.radius);
    d.inputs.target = expr(target);
    Ok(d)
}

fn descriptor(cmd: Cmd) -> anyhow::Result<Descriptor> {
    let d = match cmd {
        Cmd::Decay { op, x, y, engine } => {
            let mut d = with_op(Command::Decay, &op, &engine)?;
            d.inputs.x = expr(&x);
            d.inputs.y = expr(&y);
            d
        }
        Cmd::WitnessHm { op, ball, target, engine } => reach(Command::WitnessHm, &op, &ball, &target, &engine)?,
        Cmd::WitnessStt { op, ball, target, engine } => reach(Command::WitnessStt, &op, &ball, &target, &engine)?,
        Cmd::WitnessZero { op, ball, engine } => {
            let mut d = with_op(Command::WitnessZero, &op, &engine)?;
            d.inputs.center = expr(&ball.center);
            d.inputs.radius = Some(ball.radius);
            d
        }
        Cmd::WitnessTransitivity { op, ball, target, target_radius, engine } => {
            let mut d = with_op(Command::WitnessTransitivity, &op, &engine)?;
            d.inputs.center = expr(&ball.center);
            d.inputs.radius = Some(ball.radius);
            d.inputs.target = expr(&target);
            d.inputs.target_radius = Some(target_radius);
            d
        }
        Cmd::LeadingPoly { alpha, ball, engine } => {
            let mut d = Descriptor::new(Command::LeadingPoly);
            d.n_max = engine.n_max;
            d.tolerance = engine.tolerance;
            d.inputs.alpha = Some(alpha);
            d.inputs.center = expr(&ball.center);
            d.inputs.radius = Some(ball.radius);
            d
        }
        Cmd::Periodic { period, truncation, root } => {
            let mut d = Descriptor::new(Command::Periodic);
            d.inputs.period = Some(period);
            d.inputs.truncation = Some(truncation);
            d.inputs.root = Some(root);
            d
        }
        Cmd::Density { op, x, engine } => {
            let mut d = with_op(Command::Density, &op, &engine)?;
            d.inputs.x = expr(&x);
            d
        }
        Cmd::Verify { seed, cases } => {
            let mut d = Descriptor::new(Command::Verify);
            d.seed = seed;
            d.cases = cases;
            d
        }
    };
    Ok(d)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_MALFORMED as u8)
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<i32> {
    let mut d = match (cli.from_file, cli.command) {
        (Some(path), None) => {
            let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let value: serde_json::Value =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            Descriptor::from_json(&value).with_context(|| format!("in {}", path.display()))?
        }
        (None, Some(cmd)) => descriptor(cmd)?,
        (Some(_), Some(_)) => anyhow::bail!("--from-file cannot be combined with a subcommand"),
        (None, None) => anyhow::bail!("expected a subcommand or --from-file; see --help"),
    };
    if cli.output.is_some() {
        d.output = cli.output;
    }
    if cli.format.is_some() {
        d.format = cli.format;
    }
    let outcome = run::run(&d).map_err(|e| match e {
        RunError::Format(f) => anyhow::anyhow!("malformed input at {f}"),
        other => anyhow::Error::new(other),
    })?;
    match &d.output {
        Some(path) => {
            fs::write(path, &outcome.body).with_context(|| format!("writing {}", path.display()))?;
            println!("{}", outcome.summary);
        }
        None => {
            print!("{}", outcome.body);
            eprintln!("{}", outcome.summary);
        }
    }
    Ok(outcome.exit)
}
