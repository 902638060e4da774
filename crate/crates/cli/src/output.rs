//! Tabular records rendered as CSV or JSON.
//!
//! Numbers are printed with 12 significant digits so that repeated runs
//! produce byte-identical files.

use std::io::{self, Write};

use serde_json::{Map, Number, Value as Json};

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
    /// Empty CSV field, JSON `null`.
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// `%.12g`: 12 significant digits, trailing zeros dropped, exponent form
/// outside `1e-5 ≤ |x| < 1e12`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_fraction(&format!("{x:.decimals$}")).to_string()
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_field(cell: &Cell) -> String {
    match cell {
        Cell::Num(x) => format_number(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
        Cell::Text(t) => t.clone(),
        Cell::Missing => String::new(),
    }
}

fn json_value(cell: &Cell) -> Json {
    match cell {
        // Round-trip through the CSV text so both formats carry the same digits.
        Cell::Num(x) => format_number(*x)
            .parse::<f64>()
            .ok()
            .and_then(Number::from_f64)
            .map_or(Json::Null, Json::Number),
        Cell::Int(i) => Json::from(*i),
        Cell::Text(t) => Json::String(t.clone()),
        Cell::Missing => Json::Null,
    }
}

pub fn write_csv<W: Write>(table: &Table, mut w: W) -> io::Result<()> {
    writeln!(w, "{}", table.header.join(","))?;
    for row in &table.rows {
        let fields: Vec<String> = row.iter().map(csv_field).collect();
        writeln!(w, "{}", fields.join(","))?;
    }
    w.flush()
}

pub fn write_json<W: Write>(table: &Table, mut w: W) -> io::Result<()> {
    let records: Vec<Json> = table
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Json> = table
                .header
                .iter()
                .zip(row)
                .map(|(k, c)| (k.to_string(), json_value(c)))
                .collect();
            Json::Object(obj)
        })
        .collect();
    serde_json::to_writer_pretty(&mut w, &records)?;
    writeln!(w)?;
    w.flush()
}

pub fn write_table<W: Write>(table: &Table, format: Format, w: W) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(table, w),
        Format::Json => write_json(table, w),
    }
}
