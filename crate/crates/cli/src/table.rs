//! Row-oriented reports rendered as CSV or JSON.

use std::fmt::Write as _;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

/// Shortest text that parses back to `v`, in exponent form outside
/// `[1e−5, 1e16)`.
pub fn float(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Float(v) if v.is_finite() => s.serialize_f64(*v),
            Cell::Float(_) | Cell::Empty => s.serialize_none(),
            Cell::Int(v) => s.serialize_u64(*v),
            Cell::Bool(v) => s.serialize_bool(*v),
            Cell::Text(t) => s.serialize_str(t),
        }
    }
}

/// Rows in input order plus whether every row passed its check.
#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub failed: bool,
}

struct Rows<'a>(&'a Table);
struct Row<'a>(&'a [&'static str], &'a [Cell]);

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl Serialize for Rows<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.rows.len()))?;
        for row in &self.0.rows {
            seq.serialize_element(&Row(&self.0.columns, row))?;
        }
        seq.end()
    }
}

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(4))?;
        map.serialize_entry("schema_version", &SCHEMA_VERSION)?;
        map.serialize_entry("command", self.command)?;
        map.serialize_entry("passed", &!self.failed)?;
        map.serialize_entry("rows", &Rows(self))?;
        map.end()
    }
}

impl Table {
    pub fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Self {
            command,
            columns: columns.to_vec(),
            rows: Vec::new(),
            failed: false,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// A row with every column empty except `diagnostic` columns filled
    /// from the front.
    pub fn push_partial(&mut self, leading: Vec<Cell>) {
        let mut row = leading;
        row.resize(self.columns.len(), Cell::Empty);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_cells() {
        let mut t = Table::new("x", &["a", "b", "c", "d"]);
        t.push(vec![0.1.into(), Cell::Empty, true.into(), Cell::Text("p,q".into())]);
        t.push_partial(vec![1e-300.into()]);
        assert_eq!(t.to_csv(), "a,b,c,d\n0.1,,true,\"p,q\"\n1e-300,,,\n");
        for v in [4.762684026154886e-8, -0.125, 2.5e17, 0.1 + 0.2, f64::MIN_POSITIVE] {
            assert_eq!(float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(float(4.762684026154886e-8), "4.762684026154886e-8");
    }

    #[test]
    fn json_rows_keep_column_order() {
        let mut t = Table::new("x", &["z", "a"]);
        t.push(vec![f64::NAN.into(), 3usize.into()]);
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(
            json,
            r#"{"schema_version":1,"command":"x","passed":true,"rows":[{"z":null,"a":3}]}"#
        );
    }
}
