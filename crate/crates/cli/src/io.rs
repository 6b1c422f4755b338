//! Document loading and deterministic output.

use std::fmt::Write as _;
use std::path::Path;

use qfix::scalar::fmt_g;
use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::CliError;

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        file: path.display().to_string(),
        source,
    })
}

/// Parses `src` into `T`, reporting the field path of the first violation.
pub fn parse_json<T: DeserializeOwned>(src: &str, file: &Path) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(src);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        CliError::document(file, &at, e.into_inner())
    })
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    parse_json(&read_text(path)?, path)
}

/// Compact JSON with every float printed to 12 significant digits.
pub fn render(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v);
    out
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Number(n) if n.is_f64() => out.push_str(&number(n.as_f64().expect("f64 number"))),
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let fields: Vec<(&str, &Value)> = map.iter().map(|(k, v)| (k.as_str(), v)).collect();
            write_object(out, &fields);
        }
        other => out.push_str(&other.to_string()),
    }
}

fn write_object(out: &mut String, fields: &[(&str, &Value)]) {
    out.push('{');
    for (k, (key, value)) in fields.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        let _ = write!(out, "{}:", Value::from(*key));
        write_value(out, value);
    }
    out.push('}');
}

/// Renders an object with fields in the given order.
pub fn render_object(fields: &[(&str, Value)]) -> String {
    let refs: Vec<(&str, &Value)> = fields.iter().map(|(k, v)| (*k, v)).collect();
    let mut out = String::new();
    write_object(&mut out, &refs);
    out
}

/// A float as a JSON number; integral values keep no fraction.
pub fn number(x: f64) -> String {
    fmt_g(x)
}

pub fn floats(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| Value::from(x)).collect())
}

/// `[a,b,c]` with 12 significant digits, for text output.
pub fn list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| number(x)).collect();
    format!("[{}]", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_are_rounded() {
        let v = serde_json::json!({"b": [0.1 + 0.2, 1], "a": "x"});
        assert_eq!(render(&v), r#"{"a":"x","b":[0.3,1]}"#);
        let o = render_object(&[("z", Value::from(1.0 / 3.0)), ("a", Value::from(2))]);
        assert_eq!(o, r#"{"z":0.333333333333,"a":2}"#);
    }
}
