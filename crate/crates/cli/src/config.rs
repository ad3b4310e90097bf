//! Config files (TOML or JSON) whose keys mirror the command-line flags.
//! Flags given on the command line win; config values fill the rest.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::Value;

pub const SUBCOMMANDS: [&str; 9] = [
    "laguerre", "witness", "xval", "orbit", "weights", "atzmon", "qn", "transfer", "permute",
];

fn load(path: &Path) -> Result<serde_json::Map<String, Value>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    let value: Value = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).with_context(|| format!("config {}: invalid JSON", path.display()))?
    } else {
        let t: toml::Table = toml::from_str(&text).with_context(|| format!("config {}: invalid TOML", path.display()))?;
        serde_json::to_value(t)?
    };
    match value {
        Value::Object(m) => Ok(m),
        _ => bail!("config {}: top level must be a table", path.display()),
    }
}

fn scalar(key: &str, v: &Value) -> Result<Option<String>> {
    Ok(match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(_) => None,
        Value::Array(xs) => Some(
            xs.iter()
                .map(|x| scalar(key, x)?.ok_or_else(|| anyhow!("config key {key}: unsupported array entry")))
                .collect::<Result<Vec<_>>>()?
                .join(","),
        ),
        _ => bail!("config key {key}: unsupported value {v}"),
    })
}

/// Splices `--config FILE` into the argument list.
pub fn expand(args: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    let mut rest = Vec::with_capacity(args.len());
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or_else(|| anyhow!("--config needs a file"))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let table = load(Path::new(&path))?;
    let has_sub = rest.iter().skip(1).any(|a| SUBCOMMANDS.contains(&a.as_str()));
    if !has_sub {
        let sub = table
            .get("subcommand")
            .and_then(Value::as_str)
            .ok_or_else(|| anyhow!("config {path}: no subcommand given"))?;
        rest.insert(1.min(rest.len()), sub.to_string());
    }
    for (key, v) in &table {
        if key == "subcommand" {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        let given = rest.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if given {
            continue;
        }
        match (v, scalar(key, v)?) {
            (Value::Bool(true), _) => rest.push(flag),
            (Value::Bool(false), _) => {}
            (_, Some(s)) => {
                rest.push(flag);
                rest.push(s);
            }
            (_, None) => {}
        }
    }
    Ok(rest)
}
