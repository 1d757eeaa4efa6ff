//! Serialisation of reports: pretty JSON, or flat `key,value` CSV whose keys
//! are dotted paths into the same JSON tree.

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Structured,
}

pub fn to_json<T: Serialize>(report: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Input(format!("serialise report: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                flatten(&key(k), child, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), child, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// Flattened `key,value` rows of a serialisable report, sorted by key.
pub fn key_values<T: Serialize>(report: &T) -> Result<Vec<(String, String)>, CliError> {
    let v = serde_json::to_value(report)
        .map_err(|e| CliError::Input(format!("serialise report: {e}")))?;
    let mut out = Vec::new();
    flatten("", &v, &mut out);
    Ok(out)
}

pub fn write_key_values(rows: &[(String, String)]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Input(e.to_string());
    w.write_record(["key", "value"]).map_err(err)?;
    for (k, v) in rows {
        w.write_record([k, v]).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Input(e.to_string()))
}

pub fn read_key_values(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().map_err(|e| CliError::Input(e.to_string()))?;
    if headers != vec!["key", "value"] {
        return Err(CliError::Input(
            "line 1: expected header `key,value`".into(),
        ));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                CliError::Input(format!("line {line}: {e}"))
            })?;
            if rec.len() != 2 {
                return Err(CliError::Input(format!(
                    "line {}: expected 2 fields",
                    rec.position().map_or(0, |p| p.line())
                )));
            }
            Ok((rec[0].to_string(), rec[1].to_string()))
        })
        .collect()
}

pub fn render<T: Serialize>(report: &T, format: Format) -> Result<String, CliError> {
    match format {
        Format::Structured => to_json(report),
        Format::Csv => write_key_values(&key_values(report)?),
    }
}
