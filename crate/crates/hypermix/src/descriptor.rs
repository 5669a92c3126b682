//! Experiment descriptors: one command, its operator, inputs and output target.
//!
//! ```json
//! {
//!   "command": "witness-hm",
//!   "op": {"name": "derivative"},
//!   "inputs": {"center": "0", "radius": 0.5, "target": "1"},
//!   "n_max": 10,
//!   "output": {"path": "hm.json", "format": "json"}
//! }
//! ```
//!
//! Element inputs are either expression strings (see [`crate::expr`]) or
//! serialized elements (see [`crate::format`]).

use std::path::PathBuf;
use std::str::FromStr;

use hypermix_core::operators::OperatorConfig;
use hypermix_core::spaces::{Element, Space};
use hypermix_core::{DEFAULT_N_MAX, DEFAULT_TOLERANCE};
use serde_json::{Map, Value};

use crate::expr;
use crate::format::{self, FormatError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Decay,
    WitnessHm,
    WitnessStt,
    WitnessZero,
    WitnessTransitivity,
    LeadingPoly,
    Periodic,
    Density,
    Verify,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Decay,
        Command::WitnessHm,
        Command::WitnessStt,
        Command::WitnessZero,
        Command::WitnessTransitivity,
        Command::LeadingPoly,
        Command::Periodic,
        Command::Density,
        Command::Verify,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Decay => "decay",
            Command::WitnessHm => "witness-hm",
            Command::WitnessStt => "witness-stt",
            Command::WitnessZero => "witness-zero",
            Command::WitnessTransitivity => "witness-transitivity",
            Command::LeadingPoly => "leading-poly",
            Command::Periodic => "periodic",
            Command::Density => "density",
            Command::Verify => "verify",
        }
    }

    /// Tabular commands default to CSV, the rest to JSON.
    pub fn default_format(&self) -> OutputFormat {
        match self {
            Command::Decay | Command::Density => OutputFormat::Csv,
            _ => OutputFormat::Json,
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

/// An element before its space is known.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementInput {
    Expr(String),
    Json(Value),
}

impl ElementInput {
    pub fn resolve(&self, space: &Space, path: &str) -> Result<Element, FormatError> {
        let x = match self {
            ElementInput::Expr(s) => expr::parse_element(space, s).map_err(|e| FormatError::new(path, e.to_string()))?,
            ElementInput::Json(v) => format::element_from_json(v, path)?,
        };
        space.check(&x).map_err(|e| FormatError::new(path, e.to_string()))?;
        Ok(x)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Inputs {
    pub x: Option<ElementInput>,
    pub y: Option<ElementInput>,
    pub center: Option<ElementInput>,
    pub radius: Option<f64>,
    pub target: Option<ElementInput>,
    pub target_radius: Option<f64>,
    pub alpha: Option<String>,
    pub period: Option<usize>,
    pub truncation: Option<usize>,
    pub root: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Descriptor {
    pub command: Command,
    pub op: Option<OperatorConfig>,
    pub inputs: Inputs,
    pub n_max: usize,
    pub tolerance: f64,
    pub output: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub seed: u64,
    pub cases: usize,
}

pub const DEFAULT_SEED: u64 = 20240601;
pub const DEFAULT_CASES: usize = 25;

impl Descriptor {
    pub fn new(command: Command) -> Self {
        Descriptor {
            command,
            op: None,
            inputs: Inputs::default(),
            n_max: DEFAULT_N_MAX,
            tolerance: DEFAULT_TOLERANCE,
            output: None,
            format: None,
            seed: DEFAULT_SEED,
            cases: DEFAULT_CASES,
        }
    }

    pub fn format(&self) -> OutputFormat {
        self.format.unwrap_or_else(|| self.command.default_format())
    }

    pub fn from_json(v: &Value) -> Result<Self, FormatError> {
        let obj = v.as_object().ok_or_else(|| FormatError::new("", "descriptor must be an object"))?;
        for key in obj.keys() {
            if !["command", "op", "inputs", "n_max", "tolerance", "output", "seed", "cases"].contains(&key.as_str()) {
                return Err(FormatError::new(&format!("/{key}"), "unknown field"));
            }
        }
        let command = obj
            .get("command")
            .and_then(Value::as_str)
            .ok_or_else(|| FormatError::new("/command", "expected a command name"))?
            .parse::<Command>()
            .map_err(|e| FormatError::new("/command", e))?;
        let mut d = Descriptor::new(command);
        if let Some(op) = obj.get("op") {
            d.op = Some(format::op_from_json(op, "/op")?);
        }
        if let Some(n) = obj.get("n_max") {
            d.n_max = format::unsigned(n, "/n_max")? as usize;
        }
        if let Some(t) = obj.get("tolerance") {
            d.tolerance = format::number(t, "/tolerance")?;
        }
        if let Some(s) = obj.get("seed") {
            d.seed = format::unsigned(s, "/seed")?;
        }
        if let Some(c) = obj.get("cases") {
            d.cases = format::unsigned(c, "/cases")? as usize;
        }
        if let Some(out) = obj.get("output") {
            let o = out.as_object().ok_or_else(|| FormatError::new("/output", "expected an object"))?;
            if let Some(p) = o.get("path") {
                let p = p.as_str().ok_or_else(|| FormatError::new("/output/path", "expected a string"))?;
                d.output = Some(PathBuf::from(p));
            }
            if let Some(f) = o.get("format") {
                let f = f.as_str().ok_or_else(|| FormatError::new("/output/format", "expected a string"))?;
                d.format = Some(f.parse().map_err(|e: String| FormatError::new("/output/format", e))?);
            }
        }
        if let Some(inputs) = obj.get("inputs") {
            d.inputs = inputs_from_json(inputs)?;
        }
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), FormatError> {
        if self.n_max < 1 {
            return Err(FormatError::new("/n_max", "must be >= 1"));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(FormatError::new("/tolerance", "must be positive"));
        }
        let needs_op = !matches!(self.command, Command::LeadingPoly | Command::Periodic | Command::Verify);
        if needs_op && self.op.is_none() {
            return Err(FormatError::new("/op", format!("`{}` needs an operator", self.command.name())));
        }
        Ok(())
    }
}

fn element_input(v: &Value, path: &str) -> Result<ElementInput, FormatError> {
    match v {
        Value::String(s) => Ok(ElementInput::Expr(s.clone())),
        Value::Number(n) => Ok(ElementInput::Expr(n.to_string())),
        Value::Object(_) => Ok(ElementInput::Json(v.clone())),
        _ => Err(FormatError::new(path, "expected an expression string or an element object")),
    }
}

fn inputs_from_json(v: &Value) -> Result<Inputs, FormatError> {
    let obj: &Map<String, Value> = v.as_object().ok_or_else(|| FormatError::new("/inputs", "expected an object"))?;
    let mut inputs = Inputs::default();
    for (key, value) in obj {
        let path = format!("/inputs/{key}");
        match key.as_str() {
            "x" => inputs.x = Some(element_input(value, &path)?),
            "y" => inputs.y = Some(element_input(value, &path)?),
            "center" => inputs.center = Some(element_input(value, &path)?),
            "target" => inputs.target = Some(element_input(value, &path)?),
            "radius" => inputs.radius = Some(format::number(value, &path)?),
            "target_radius" => inputs.target_radius = Some(format::number(value, &path)?),
            "alpha" => {
                inputs.alpha = Some(match value {
                    Value::String(s) => s.clone(),
                    Value::Number(n) => n.to_string(),
                    _ => return Err(FormatError::new(&path, "expected a scalar")),
                })
            }
            "period" => inputs.period = Some(format::unsigned(value, &path)? as usize),
            "truncation" => inputs.truncation = Some(format::unsigned(value, &path)? as usize),
            "root" => inputs.root = Some(format::unsigned(value, &path)? as usize),
            _ => return Err(FormatError::new(&path, "unknown input")),
        }
    }
    Ok(inputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn parses_a_full_descriptor() {
        let d = Descriptor::from_json(&json!({
            "command": "decay",
            "op": {"name": "translation-lp", "w": 2, "a": "1/2", "p": 1},
            "inputs": {"x": "chi(0,1)", "y": 0},
            "n_max": 8,
            "output": {"path": "out.csv"}
        }))
        .unwrap();
        assert_eq!(d.command, Command::Decay);
        assert_eq!(d.n_max, 8);
        assert_eq!(d.format(), OutputFormat::Csv);
        assert_eq!(d.inputs.y, Some(ElementInput::Expr("0".into())));
        let x = d.inputs.x.unwrap().resolve(&d.op.unwrap().space(), "/inputs/x").unwrap();
        assert!(x.as_piecewise().is_some());
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad = [
            (json!({"command": "nope"}), "/command"),
            (json!({"command": "decay"}), "/op"),
            (json!({"command": "decay", "op": "derivative", "n_max": 0}), "/n_max"),
            (json!({"command": "decay", "op": "derivative", "inputs": {"x": []}}), "/inputs/x"),
            (json!({"command": "decay", "op": "derivative", "extra": 1}), "/extra"),
            (json!({"command": "decay", "op": {"name": "translation-c0", "w": 0.5, "a": 1}}), "/op"),
        ];
        for (v, path) in bad {
            assert_eq!(Descriptor::from_json(&v).unwrap_err().path, path, "{v}");
        }
    }
}
