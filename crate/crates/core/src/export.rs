//! CSV and JSON output.
//!
//! Every real number is rounded to 12 significant digits once, in [`sig12`];
//! the CSV text and the JSON number are both produced from that rounded
//! value, so the two formats agree digit for digit.

use std::fmt::Display;
use std::io::Write;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::matrix::SquareMatrix;
use crate::scalar::Real;
use crate::Complex;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float parses")
}

/// Shortest text of `x` rounded to 12 significant digits. Integral values
/// keep a trailing `.0` as in JSON; magnitudes below `1e-5` or from `1e16` up
/// use exponent notation.
pub fn sig12(x: f64) -> String {
    let r = round_sig(x);
    let a = r.abs();
    if !r.is_finite() || (r != 0.0 && !(1e-5..1e16).contains(&a)) {
        format!("{r:e}")
    } else if r.fract() == 0.0 {
        format!("{r:.1}")
    } else {
        format!("{r}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Bool(bool),
    /// Missing value: an empty CSV field, `null` in JSON.
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => sig12(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Real(v) => json!(round_sig(*v)),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

impl Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.csv())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// How metadata is written above the CSV body.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preamble {
    None,
    /// One bare `key=value,...` line.
    Bare,
    /// One `# key=value; ...` comment line.
    Comment,
}

/// A metadata block plus a table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, Cell)>,
    pub preamble: Preamble,
    /// Write the column names as the first CSV row.
    pub column_header: bool,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            meta: Vec::new(),
            preamble: Preamble::None,
            column_header: true,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_meta(mut self, preamble: Preamble, meta: Vec<(&str, Cell)>) -> Self {
        self.preamble = preamble;
        self.meta = meta.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut out = out;
        match self.preamble {
            Preamble::None => {}
            Preamble::Bare => {
                let line: Vec<String> = self.meta.iter().map(|(k, v)| format!("{k}={}", v.csv())).collect();
                writeln!(out, "{}", line.join(","))?;
            }
            Preamble::Comment => {
                let line: Vec<String> = self.meta.iter().map(|(k, v)| format!("{k}={}", v.csv())).collect();
                writeln!(out, "# {}", line.join("; "))?;
            }
        }
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
        if self.column_header {
            w.write_record(&self.columns)?;
        }
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        for (k, v) in &self.meta {
            obj.insert(k.clone(), v.json());
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(self.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect())
            })
            .collect();
        obj.insert("rows".into(), Value::Array(rows));
        Value::Object(obj)
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, &self.to_json()).map_err(|e| crate::Error::Io(e.to_string()))?;
        writeln!(out)?;
        Ok(())
    }
}

/// Matrix CSV: `n=<order>,rowsum=<c>` then one line per row.
pub fn matrix_table<T>(m: &SquareMatrix<T>) -> Table
where
    T: num_traits::Num + PartialEq + Copy + Into<Cell>,
{
    let columns: Vec<String> = (1..=m.order()).map(|j| format!("c{j}")).collect();
    let rowsum: Cell = match m.row_sum() {
        Some(c) => c.into(),
        None => Cell::Text("none".into()),
    };
    Table {
        meta: vec![("n".into(), m.order().into()), ("rowsum".into(), rowsum)],
        preamble: Preamble::Bare,
        column_header: false,
        columns,
        rows: m.rows().map(|r| r.iter().map(|&v| v.into()).collect()).collect(),
    }
}

/// Matrix JSON: `{"n", "rowsum", "rows": [[...], ...]}`.
pub fn matrix_json<T>(m: &SquareMatrix<T>) -> Value
where
    T: num_traits::Num + PartialEq + Copy + Into<Cell>,
{
    let t = matrix_table(m);
    let mut obj = Map::new();
    for (k, v) in &t.meta {
        obj.insert(k.clone(), v.json());
    }
    let rows: Vec<Value> = t.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
    obj.insert("rows".into(), Value::Array(rows));
    Value::Object(obj)
}

/// Spectrum CSV: `order=..,rowsum=..`, then `re,im` rows in export order.
pub fn spectrum_table<T: Real>(order: usize, rowsum: f64, eigenvalues: &[Complex<T>]) -> Table {
    let mut t = Table::new(&["re", "im"]).with_meta(
        Preamble::Bare,
        vec![("order", order.into()), ("rowsum", rowsum.into())],
    );
    for z in eigenvalues {
        t.push(vec![to_f64(z.re).into(), to_f64(z.im).into()]);
    }
    t
}

pub const SURVEY_COLUMNS: [&str; 9] =
    ["m", "N", "signature", "mode", "strategy", "value", "argmax", "evaluated", "wall_ms"];

pub const REGION_COLUMNS: [&str; 7] = ["N", "sigma", "re", "im", "modulus", "in_region", "active_constraint"];

pub const DECAY_COLUMNS: [&str; 4] = ["n", "C_exact", "C_mc", "mc_se"];

/// Short content hash of an observable's printed values.
pub fn observable_hash<T: Real>(values: &[T]) -> String {
    let text: Vec<String> = values.iter().map(|&v| sig12(to_f64(v))).collect();
    let digest = Sha256::digest(text.join(",").as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
