//! Versioned JSON report envelope and serialization helpers.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub const SCHEMA: &str = "kitai-lab/report-v1";

/// Serde adapter writing a rational as `"num/den"`.
pub mod rational_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::numeric::{rational, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational::to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        rational::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Undecided,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// `Some(true)` pass, `Some(false)` fail, `None` undecided.
    pub fn from_option(v: Option<bool>) -> Self {
        match v {
            Some(true) => Status::Pass,
            Some(false) => Status::Fail,
            None => Status::Undecided,
        }
    }

    pub fn and(self, other: Status) -> Status {
        match (self, other) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Undecided, _) | (_, Status::Undecided) => Status::Undecided,
            _ => Status::Pass,
        }
    }
}

/// One asserted property of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, status: Status, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status,
            detail: detail.into(),
        }
    }
}

/// Configuration echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub precision: u32,
    pub thresholds: Map<String, Value>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub inputs: Map<String, Value>,
    pub config: RunConfig,
    pub results: Value,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timestamp: Option<String>,
}

impl Report {
    pub fn new(command: impl Into<String>, inputs: Map<String, Value>, config: RunConfig) -> Self {
        Report {
            schema: SCHEMA.into(),
            command: command.into(),
            inputs,
            config,
            results: Value::Null,
            checks: Vec::new(),
            timestamp: None,
        }
    }

    pub fn overall(&self) -> Status {
        self.checks
            .iter()
            .fold(Status::Pass, |a, c| a.and(c.status))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Structural validation of a serialized report against the v1 schema.
pub fn validate(v: &Value) -> Result<()> {
    let bad = |m: &str| Err(Error::Verification(format!("report schema: {m}")));
    let Some(obj) = v.as_object() else {
        return bad("top level is not an object");
    };
    if obj.get("schema").and_then(Value::as_str) != Some(SCHEMA) {
        return bad("missing or wrong schema tag");
    }
    if !obj.get("command").is_some_and(Value::is_string) {
        return bad("command must be a string");
    }
    if !obj.get("inputs").is_some_and(Value::is_object) {
        return bad("inputs must be an object");
    }
    if obj
        .get("inputs")
        .and_then(Value::as_object)
        .is_some_and(|m| m.values().any(|x| x.is_number()))
    {
        return bad("inputs must be echoed as strings, not numbers");
    }
    let Some(cfg) = obj.get("config").and_then(Value::as_object) else {
        return bad("config must be an object");
    };
    if !cfg.get("precision").is_some_and(Value::is_u64) {
        return bad("config.precision must be an integer");
    }
    if !cfg.get("thresholds").is_some_and(Value::is_object) {
        return bad("config.thresholds must be an object");
    }
    if !cfg.get("seed").is_some_and(|s| s.is_null() || s.is_u64()) {
        return bad("config.seed must be an integer or null");
    }
    if !obj.contains_key("results") {
        return bad("results missing");
    }
    let Some(checks) = obj.get("checks").and_then(Value::as_array) else {
        return bad("checks must be an array");
    };
    for c in checks {
        let status = c.get("status").and_then(Value::as_str);
        if !matches!(status, Some("pass" | "fail" | "undecided")) {
            return bad("check status must be pass, fail or undecided");
        }
        if !c.get("name").is_some_and(Value::is_string)
            || !c.get("detail").is_some_and(Value::is_string)
        {
            return bad("check needs name and detail strings");
        }
    }
    if let Some(t) = obj.get("timestamp") {
        if !t.is_string() {
            return bad("timestamp must be a string");
        }
    }
    validate_balls(v)
}

/// Every object with exactly `mid` and `rad` keys must carry hex strings.
fn validate_balls(v: &Value) -> Result<()> {
    match v {
        Value::Object(m) => {
            if m.len() == 2 && m.contains_key("mid") && m.contains_key("rad") {
                for k in ["mid", "rad"] {
                    let s = m[k].as_str().unwrap_or("");
                    if crate::numeric::Dyadic::from_hex(s).is_err() {
                        return Err(Error::Verification(format!(
                            "report schema: bad ball field {k}={s:?}"
                        )));
                    }
                }
                return Ok(());
            }
            m.values().try_for_each(validate_balls)
        }
        Value::Array(a) => a.iter().try_for_each(validate_balls),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Ball;

    fn sample() -> Report {
        let mut inputs = Map::new();
        inputs.insert("f".into(), Value::String("1".into()));
        let cfg = RunConfig {
            precision: 256,
            thresholds: Map::new(),
            seed: None,
        };
        let mut r = Report::new("witness", inputs, cfg);
        r.results = serde_json::json!({ "b": Ball::one(64) });
        r.checks.push(Check::new("decreasing", Status::Pass, "ok"));
        r
    }

    #[test]
    fn round_trip_and_validate() {
        let r = sample();
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        validate(&v).unwrap();
        let back: Report = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
        assert_eq!(r.overall(), Status::Pass);
    }

    #[test]
    fn validator_rejects_malformed() {
        let mut v: Value = serde_json::to_value(sample()).unwrap();
        v["schema"] = Value::String("other".into());
        assert!(validate(&v).is_err());
        let mut v: Value = serde_json::to_value(sample()).unwrap();
        v["checks"][0]["status"] = Value::String("maybe".into());
        assert!(validate(&v).is_err());
        let mut v: Value = serde_json::to_value(sample()).unwrap();
        v["results"]["b"]["mid"] = Value::String("12".into());
        assert!(validate(&v).is_err());
        let mut v: Value = serde_json::to_value(sample()).unwrap();
        v["inputs"]["n"] = serde_json::json!(3);
        assert!(validate(&v).is_err());
    }

    #[test]
    fn status_combination() {
        assert_eq!(Status::Pass.and(Status::Undecided), Status::Undecided);
        assert_eq!(Status::Undecided.and(Status::Fail), Status::Fail);
        assert_eq!(Status::from_option(None), Status::Undecided);
    }
}
