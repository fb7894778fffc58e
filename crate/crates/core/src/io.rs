//! Run configuration and the CSV / JSONL record writers.
//!
//! Every output starts with a header carrying the full [`RunConfig`]: CSV
//! comment lines starting with `#`, or a JSONL preamble object with a
//! `config` key. Everything after the header is the data section, which is
//! a function of the configuration alone (the worker count does not enter).
//! Floats are written with 17 significant digits (`{:.16e}`).

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    #[default]
    Jsonl,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            _ => Err(Error::Parse(format!("unknown format {s:?} (csv, jsonl)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    /// Subcommand parameters, by flag name.
    pub params: BTreeMap<String, Value>,
    pub seed: u64,
    pub threads: usize,
    pub out: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub format: Format,
    pub version: String,
}

/// `x` with 17 significant digits; non-finite values as `NaN`, `inf`,
/// `-inf`.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn write_json(v: &Value, out: &mut String) {
    match v {
        Value::Number(n) if n.is_f64() => out.push_str(&format_f64(n.as_f64().expect("f64"))),
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_json(x, out);
            }
            out.push(']');
        }
        Value::Object(m) => {
            out.push('{');
            for (i, (k, x)) in m.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_json(x, out);
            }
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

/// Compact JSON with floats in `{:.16e}` form.
pub fn to_json_line(v: &Value) -> String {
    let mut s = String::new();
    write_json(v, &mut s);
    s
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(_) | Value::Object(_) => to_json_line(v),
        other => to_json_line(other),
    }
}

/// Serialize anything to a JSON value; NaN and infinities become `null`.
pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("records are serializable")
}

/// Write the header, then one record per element of `records`. `columns`
/// fixes the CSV header row (and so an empty stream gives a header-only
/// file); JSONL records are written whole.
pub fn emit(
    w: &mut dyn Write,
    config: &RunConfig,
    notes: &[&str],
    columns: &[&str],
    records: &[Value],
) -> Result<()> {
    let cfg = to_json_line(&to_value(config));
    match config.format {
        Format::Jsonl => {
            let mut pre = serde_json::Map::new();
            pre.insert("config".into(), serde_json::from_str(&cfg).expect("valid json"));
            if !notes.is_empty() {
                pre.insert("notes".into(), to_value(&notes));
            }
            writeln!(w, "{}", to_json_line(&Value::Object(pre)))?;
            for r in records {
                writeln!(w, "{}", to_json_line(r))?;
            }
        }
        Format::Csv => {
            writeln!(w, "# config: {cfg}")?;
            for n in notes {
                writeln!(w, "# {n}")?;
            }
            let mut body = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Io(e.to_string());
            body.write_record(columns).map_err(io)?;
            for r in records {
                let row: Vec<String> = columns.iter().map(|c| r.get(*c).map(csv_cell).unwrap_or_default()).collect();
                body.write_record(&row).map_err(io)?;
            }
            w.write_all(&body.into_inner().map_err(|e| Error::Io(e.to_string()))?)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// The part of an emitted output after its header.
pub fn data_section(text: &str, format: Format) -> &str {
    match format {
        Format::Jsonl => text.split_once('\n').map_or("", |(_, rest)| rest),
        Format::Csv => {
            let mut rest = text;
            while rest.starts_with('#') {
                rest = rest.split_once('\n').map_or("", |(_, r)| r);
            }
            rest
        }
    }
}

/// Parse JSONL output back into `(preamble, records)`.
pub fn read_jsonl(text: &str) -> Result<(Value, Vec<Value>)> {
    let mut lines = text.lines();
    let parse = |l: &str| serde_json::from_str::<Value>(l).map_err(|e| Error::Parse(e.to_string()));
    let pre = parse(lines.next().ok_or_else(|| Error::Parse("empty output".into()))?)?;
    let recs = lines.map(parse).collect::<Result<_>>()?;
    Ok((pre, recs))
}
