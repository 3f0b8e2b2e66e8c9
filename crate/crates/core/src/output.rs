//! Number formatting and the JSON envelope shared by CLI outputs.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Identifies the envelope layout; bumped on incompatible changes.
pub const SCHEMA: &str = "singseries-output";
pub const SCHEMA_VERSION: u32 = 1;

/// Top-level JSON document written by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub schema: String,
    pub schema_version: u32,
    /// Crate version that produced the file.
    pub version: String,
    pub command: String,
    pub parameters: Value,
    /// Shared options: shards, seed, budget.
    pub common: Value,
    pub result: Value,
}

impl Envelope {
    pub fn new<C: Serialize, O: Serialize>(command: &C, common: &O, result: Value) -> Result<Self> {
        let tagged = serde_json::to_value(command)?;
        let name = tagged
            .get("command")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Config("command does not serialize with a tag".into()))?
            .to_string();
        Ok(Self {
            schema: SCHEMA.into(),
            schema_version: SCHEMA_VERSION,
            version: crate::VERSION.into(),
            command: name,
            parameters: tagged.get("parameters").cloned().unwrap_or(Value::Null),
            common: serde_json::to_value(common)?,
            result,
        })
    }
}

/// `x` rounded to 15 significant digits, printed without trailing zeros.
pub fn sig15(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let rounded: f64 = format!("{x:.14e}").parse().expect("float round trip");
    let a = rounded.abs();
    if a == 0.0 || (1e-5..1e15).contains(&a) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_digits() {
        assert_eq!(sig15(2.0), "2");
        assert_eq!(sig15(1.3203236316937392), "1.32032363169374");
        assert_eq!(sig15(0.1 + 0.2), "0.3");
        assert_eq!(sig15(1.2345678901234567e-9), "1.23456789012346e-9");
        assert_eq!(sig15(6.02214076e23), "6.02214076e23");
        assert_eq!(sig15(f64::INFINITY), "inf");
        assert_eq!(sig15(-0.0), "-0");
    }
}
