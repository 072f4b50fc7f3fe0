//! Machine-readable run reports.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config_file::RunConfigFile;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    /// The configuration as parsed, unrounded, so it can be run again.
    pub config: Option<RunConfigFile>,
    pub results: Value,
    pub verification: Value,
    /// Present only when asked for; it would break byte stability.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing: Option<Timing>,
}

impl RunReport {
    /// Builds a report, rounding every float in `results` and `verification`
    /// to 12 significant digits.
    pub fn new(
        command: &str,
        config: Option<RunConfigFile>,
        results: impl Serialize,
        verification: impl Serialize,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: "critline".into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            results: rounded(&results),
            verification: rounded(&verification),
            timing: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn rounded<T: Serialize>(v: &T) -> Value {
    round_floats(serde_json::to_value(v).expect("serializable"))
}

/// `x` rounded to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Text form with 12 significant digits, for tables and summaries.
pub fn fmt12(x: f64) -> String {
    if x.is_finite() {
        format!("{}", sig12(x))
    } else {
        format!("{x}")
    }
}

/// Rounds every float in a JSON tree; non-finite values become `null`.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            serde_json::Number::from_f64(sig12(x))
                .map(Value::Number)
                .unwrap_or(Value::Null)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => Value::Object(
            map.into_iter()
                .map(|(k, v)| (k, round_floats(v)))
                .collect(),
        ),
        other => other,
    }
}
