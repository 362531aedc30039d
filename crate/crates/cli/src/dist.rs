//! `--dist` parsing: either the JSON form of a spec or a shorthand such as
//! `normal sigma=0.05`, `nakagami m=2 Ω=10` or `gamma:alpha=0.5,lambda=1`.

use anyhow::{anyhow, bail, Context, Result};
use dmim::Spec64;
use serde_json::{Map, Value};

/// Canonical parameter name for a shorthand key; Greek letters are accepted.
fn canonical_key(key: &str) -> &str {
    match key {
        "μ" | "mean" => "mu",
        "σ" | "sd" => "sigma",
        "λ" | "rate" => "lambda",
        "α" | "shape" => "alpha",
        "θ" | "location" => "theta",
        "Ω" | "ω" => "omega",
        other => other,
    }
}

pub fn parse_dist(tokens: &[String]) -> Result<Spec64> {
    let joined = tokens.join(" ");
    let text = joined.trim();
    if text.is_empty() {
        bail!("--dist is empty");
    }
    let value = if text.starts_with('{') {
        serde_json::from_str::<Value>(text).context("--dist is not valid JSON")?
    } else {
        shorthand(text)?
    };
    serde_json::from_value(value).map_err(|e| anyhow!("invalid distribution: {e}"))
}

fn shorthand(text: &str) -> Result<Value> {
    let mut parts = text
        .split(|c: char| c.is_whitespace() || c == ',' || c == ':')
        .filter(|s| !s.is_empty());
    let family = parts.next().unwrap_or_default().to_lowercase();
    let mut params = Map::new();
    for part in parts {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("expected key=value, got `{part}`"))?;
        let v: f64 = v
            .parse()
            .map_err(|_| anyhow!("parameter `{k}` is not a number: `{v}`"))?;
        let v = serde_json::Number::from_f64(v)
            .ok_or_else(|| anyhow!("parameter `{k}` must be finite"))?;
        params.insert(canonical_key(k).to_string(), Value::Number(v));
    }
    let mut obj = Map::new();
    obj.insert("family".into(), Value::String(family));
    obj.insert("params".into(), Value::Object(params));
    Ok(Value::Object(obj))
}
