//! Number formatting and CSV/JSON emission.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Round to 9 significant digits.
pub fn sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

/// CSV cell for a number: plain decimal in the usual range, exponent otherwise.
pub fn fmt_num(x: f64) -> String {
    let r = sig9(x);
    if r != 0.0 && r.is_finite() && !(1e-4..1e15).contains(&r.abs()) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// Round every float in a JSON tree to 9 significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = sig9(n.as_f64().expect("f64"));
            Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
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
        Value::Number(n) => {
            let cell = match (n.as_i64(), n.as_u64(), n.as_f64()) {
                (Some(i), _, _) => i.to_string(),
                (_, Some(u), _) => u.to_string(),
                (_, _, Some(f)) => fmt_num(f),
                _ => n.to_string(),
            };
            out.push((prefix.to_string(), cell));
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::Null => out.push((prefix.to_string(), String::new())),
    }
}

/// Where a command's result goes.
#[derive(Debug, Clone)]
pub struct Sink {
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Sink {
    fn write(&self, bytes: &[u8]) -> Result<()> {
        match &self.out {
            Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
            None => {
                let mut stdout = io::stdout().lock();
                stdout.write_all(bytes)?;
                stdout.flush()?;
                Ok(())
            }
        }
    }

    fn csv(&self, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        self.write(&w.into_inner().context("flushing csv")?)
    }

    fn json(&self, v: Value) -> Result<()> {
        let mut text = serde_json::to_string_pretty(&round_json(v))?;
        text.push('\n');
        self.write(text.as_bytes())
    }

    /// A report object. CSV output lists it as dotted `key,value` pairs.
    pub fn report(&self, v: Value) -> Result<()> {
        match self.format {
            Format::Json => self.json(v),
            Format::Csv => {
                let mut pairs = Vec::new();
                flatten("", &round_json(v), &mut pairs);
                let rows: Vec<Vec<String>> = pairs.into_iter().map(|(k, v)| vec![k, v]).collect();
                self.csv(&["key", "value"], &rows)
            }
        }
    }

    /// A table. JSON output is an array of objects keyed by the header.
    pub fn table(&self, header: &[&str], rows: &[Vec<Value>]) -> Result<()> {
        match self.format {
            Format::Json => {
                let objects = rows
                    .iter()
                    .map(|row| {
                        let map: Map<String, Value> =
                            header.iter().map(|h| h.to_string()).zip(row.iter().cloned()).collect();
                        Value::Object(map)
                    })
                    .collect();
                self.json(Value::Array(objects))
            }
            Format::Csv => {
                let cells: Vec<Vec<String>> = rows
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|v| {
                                let mut flat = Vec::new();
                                flatten("", v, &mut flat);
                                flat.pop().map(|(_, cell)| cell).unwrap_or_default()
                            })
                            .collect()
                    })
                    .collect();
                self.csv(header, &cells)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(12345.678912345), 12345.6789);
        assert_eq!(sig9(6f64.sqrt() / 3.0), 0.816496581);
        assert_eq!(sig9(-0.0), 0.0);
        assert_eq!(sig9(1.6), 1.6);
        assert_eq!(fmt_num(2.0 * std::f64::consts::SQRT_2), "2.82842712");
        assert_eq!(fmt_num(2.220446049250313e-16), "2.22044605e-16");
        assert_eq!(fmt_num(1.0), "1");
    }

    #[test]
    fn flattening() {
        let mut out = Vec::new();
        flatten("", &json!({"a": {"b": 1.5, "c": [true, 2]}, "d": null}), &mut out);
        assert_eq!(
            out,
            vec![
                ("a.b".into(), "1.5".into()),
                ("a.c.0".into(), "true".into()),
                ("a.c.1".into(), "2".into()),
                ("d".into(), String::new()),
            ]
        );
    }
}
