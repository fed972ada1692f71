use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{parse_json, read_text, write_bytes, IoError};
use crate::selection::{LeaderboardRow, ScoredRow, SprReport, SweepRow};

/// `x` with six significant digits, trailing zeros trimmed; exponent form
/// outside `[1e-4, 1e6)`.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // Round once in exponent form so the exponent reflects the rounded value.
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Str(String),
    Float(f64),
    Int(u64),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Str(s) => s.clone(),
            Cell::Float(v) => fmt_sig6(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
        }
    }
}

/// A row that can be written as a CSV line.
pub trait ReportRow: Serialize {
    fn columns() -> &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

/// Replace every float in `v` with its six-digit rounding.
pub(crate) fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let rounded: f64 = fmt_sig6(n.as_f64().expect("f64")).parse().expect("formatted float parses");
            if let Some(r) = serde_json::Number::from_f64(rounded) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Pretty JSON with rounded floats and a trailing newline.
pub fn to_json_bytes<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_value(value).expect("report values serialize");
    round_floats(&mut v);
    let mut out = serde_json::to_vec_pretty(&v).expect("json value serializes");
    out.push(b'\n');
    out
}

pub fn to_csv_bytes<R: ReportRow>(rows: &[R]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(R::columns()).expect("in-memory write");
    for row in rows {
        w.write_record(row.cells().iter().map(Cell::render)).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Write `rows` to `path`. Output depends only on the rows.
pub fn write_report<R: ReportRow>(rows: &[R], format: ReportFormat, path: &Path) -> Result<(), IoError> {
    let bytes = match format {
        ReportFormat::Json => to_json_bytes(rows),
        ReportFormat::Csv => to_csv_bytes(rows),
    };
    write_bytes(path, &bytes)
}

/// Read back rows written as JSON.
pub fn read_json_report<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, IoError> {
    parse_json(path, &read_text(path)?)
}

impl ReportRow for SweepRow {
    fn columns() -> &'static [&'static str] {
        &["model", "p_b", "lambda_profile", "eosl"]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Str(self.model.clone()),
            Cell::Float(self.p_b),
            Cell::Str(self.lambda_profile.clone()),
            Cell::Float(self.eosl),
        ]
    }
}

impl ReportRow for LeaderboardRow {
    fn columns() -> &'static [&'static str] {
        &["item_id", "winner", "eosl", "energy_j", "similarity"]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Str(self.item_id.clone()),
            Cell::Str(self.winner.clone()),
            Cell::Float(self.eosl),
            Cell::Float(self.energy_j),
            Cell::Float(self.similarity),
        ]
    }
}

impl ReportRow for SprReport {
    fn columns() -> &'static [&'static str] {
        &["criterion", "sample_size", "mean_similarity", "mean_energy_j", "spr"]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Str(self.criterion.to_string()),
            Cell::Int(self.sample_size as u64),
            Cell::Float(self.mean_similarity),
            Cell::Float(self.mean_energy_j),
            Cell::Float(self.spr),
        ]
    }
}

impl ReportRow for ScoredRow {
    fn columns() -> &'static [&'static str] {
        &[
            "item_id",
            "model_id",
            "similarity",
            "noise",
            "channel_loss",
            "comm_energy_j",
            "ec_ratio",
            "energy_j",
            "es_ratio",
            "eosl",
            "blended_eosl",
            "rounds_used",
            "converged",
        ]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Str(self.item_id.clone()),
            Cell::Str(self.model_id.clone()),
            Cell::Float(self.similarity),
            Cell::Float(self.noise),
            Cell::Float(self.channel_loss),
            Cell::Float(self.comm_energy_j),
            Cell::Float(self.ec_ratio),
            Cell::Float(self.energy_j),
            Cell::Float(self.es_ratio),
            Cell::Float(self.eosl),
            self.blended_eosl.map_or(Cell::Str(String::new()), Cell::Float),
            Cell::Int(self.rounds_used as u64),
            Cell::Bool(self.converged),
        ]
    }
}
