//! JSON reports: a versioned envelope and a writer that prints every float
//! with 17 significant digits. Non-finite floats are written as the strings
//! `"inf"`, `"-inf"` and `"nan"` via [`nonfinite`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::error::Result;

pub const SCHEMA: &str = "ncharm-report/1";

/// `serialize_with` helper for floats that may be infinite or NaN.
pub fn nonfinite<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// A float as a JSON value, with the same string forms as [`nonfinite`].
pub fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(
        || Value::String(if x.is_nan() { "nan" } else if x > 0.0 { "inf" } else { "-inf" }.into()),
        Value::Number,
    )
}

/// One named result and the oracle or formula behind it.
#[derive(Debug, Clone, Serialize)]
pub struct Tagged {
    pub value: Value,
    pub source: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub config: BTreeMap<String, String>,
    pub results: BTreeMap<String, Tagged>,
    pub diagnostics: Vec<String>,
    pub status: String,
    /// `None` when timing is switched off for byte-identical output.
    pub runtime_ms: Option<u64>,
}

impl Report {
    pub fn new(command: Vec<String>, config: BTreeMap<String, String>) -> Self {
        Report {
            schema: SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            results: BTreeMap::new(),
            diagnostics: Vec::new(),
            status: "ok".into(),
            runtime_ms: None,
        }
    }

    pub fn add(&mut self, name: &str, value: impl Serialize, source: &str) -> Result<()> {
        let value = serde_json::to_value(value)?;
        self.results.insert(name.to_string(), Tagged { value, source: source.to_string() });
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        to_json_string(&serde_json::to_value(self)?)
    }
}

/// Pretty JSON with floats as `{:.16e}`; integers stay integers.
pub fn to_json_string(v: &Value) -> Result<String> {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    Ok(out)
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().expect("f64 number");
                let _ = write!(out, "{x:.16e}");
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}
