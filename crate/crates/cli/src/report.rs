use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Map, Value};

use retrodict::io::FromJson;
use retrodict::{Error, Tolerances};

/// Significant digits kept for every float in a report.
const DIGITS: usize = 12;

pub struct Success {
    pub result: Value,
    pub summary: String,
}

#[derive(Debug)]
pub enum Failure {
    /// Input that could not be read, parsed or validated.
    Input(Error),
    /// A computation that is undefined or failed for valid input.
    Domain(Error),
}

impl Failure {
    pub const DOMAIN: u8 = 1;
    pub const USAGE: u8 = 2;

    fn parts(&self) -> (&Error, u8) {
        match self {
            Failure::Input(e) => (e, Self::USAGE),
            Failure::Domain(e) => (e, Self::DOMAIN),
        }
    }
}

pub type Outcome = Result<Success, Failure>;

pub fn domain<T>(r: retrodict::Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Domain)
}

/// Reads a JSON document from a file, or from stdin for `-`.
pub fn load<T: FromJson>(path: &std::path::Path, tol: &Tolerances) -> Result<T, Failure> {
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(path)
    }
    .map_err(|e| Failure::Input(Error::Parse(format!("{}: {e}", path.display()))))?;
    retrodict::io::from_str(&text, tol).map_err(Failure::Input)
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize to JSON")
}

/// Builder for the text summary.
#[derive(Default)]
pub struct Summary(String);

impl Summary {
    pub fn line(&mut self, text: impl AsRef<str>) -> &mut Self {
        let _ = writeln!(self.0, "{}", text.as_ref());
        self
    }

    pub fn kv(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        let _ = writeln!(self.0, "  {key:<28} {value}");
        self
    }

    pub fn finish(self, result: Value) -> Outcome {
        Ok(Success {
            result,
            summary: self.0.trim_end().to_string(),
        })
    }
}

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", DIGITS - 1, x).parse().unwrap_or(x)
}

fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n.as_f64().map_or(Value::Null, |x| json!(round_sig(x))),
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, x)| (k, round_floats(x))).collect()),
        other => other,
    }
}

/// Returns the JSON text, the summary and the exit code.
pub fn render(command: &str, tol: &Tolerances, seed: u64, outcome: Outcome) -> (String, String, u8) {
    let mut report = Map::new();
    report.insert("command".into(), json!(command));
    report.insert("seed".into(), json!(seed));
    report.insert("tolerances".into(), to_value(tol));
    let (summary, code) = match outcome {
        Ok(s) => {
            report.insert("status".into(), json!("ok"));
            report.insert("result".into(), s.result);
            (format!("{command}: ok\n{}", s.summary), 0)
        }
        Err(f) => {
            let (e, code) = f.parts();
            report.insert("status".into(), json!("error"));
            report.insert("error".into(), json!({ "kind": e.kind(), "message": e.to_string() }));
            (format!("{command}: error ({}): {e}", e.kind()), code)
        }
    };
    let text = serde_json::to_string_pretty(&round_floats(Value::Object(report))).expect("JSON values print");
    (text, summary.trim_end().to_string(), code)
}
