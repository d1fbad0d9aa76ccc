//! Deterministic CSV/JSON serialization of result tables.

use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::Path;
use tbqudit::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

/// `%.12g`: 12 significant digits, trailing zeros trimmed, exponent form
/// outside `1e-4 ≤ |v| < 1e12`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..12).contains(&exp) {
        format!("{}e{}{:02}", trim(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        trim(&format!("{:.*}", (11 - exp).max(0) as usize, v))
    }
}

pub fn table_to_csv(table: &Table) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(&table.columns).expect("in-memory write");
    for row in &table.rows {
        w.write_record(row.iter().map(|v| format_float(*v))).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn table_from_csv(bytes: &[u8]) -> Result<Table, String> {
    let mut r = csv::Reader::from_reader(bytes);
    let columns: Vec<String> = r.headers().map_err(|e| e.to_string())?.iter().map(str::to_string).collect();
    let mut table = Table::new(columns);
    for rec in r.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let row: Vec<f64> = rec.iter().map(|s| s.parse::<f64>().map_err(|e| format!("{s:?}: {e}"))).collect::<Result<_, _>>()?;
        if row.len() != table.columns.len() {
            return Err(format!("row has {} fields, header has {}", row.len(), table.columns.len()));
        }
        table.push(row);
    }
    Ok(table)
}

fn number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub fn table_to_json(table: &Table, meta: &Map<String, Value>) -> Vec<u8> {
    let records: Vec<Value> = table
        .rows
        .iter()
        .map(|row| Value::Object(table.columns.iter().cloned().zip(row.iter().map(|v| number(*v))).collect()))
        .collect();
    let mut out = serde_json::to_vec_pretty(&json!({ "meta": meta, "records": records })).expect("json serializes");
    out.push(b'\n');
    out
}

/// Write `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), String> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let fail = |e: &dyn std::fmt::Display| format!("cannot write {}: {e}", path.display());
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| fail(&e))?;
    tmp.write_all(bytes).map_err(|e| fail(&e))?;
    tmp.persist(path).map_err(|e| fail(&e.error))?;
    Ok(())
}

pub fn emit_table(table: &Table, format: Format, path: &Path, meta: &Map<String, Value>) -> Result<(), String> {
    let bytes = match format {
        Format::Csv => table_to_csv(table),
        Format::Json => table_to_json(table, meta),
    };
    write_atomic(path, &bytes)
}
