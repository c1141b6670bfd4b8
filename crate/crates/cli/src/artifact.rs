//! Tabular artifacts written as CSV or JSON.
//!
//! CSV layout: `# key=value` metadata lines, one header line, data rows, then
//! `# key=value` summary lines. Floats are written with 17 significant digits.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::args::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    /// (t, value) pairs; `t:value;…` in CSV, an array of pairs in JSON.
    Series(Vec<(f64, f64)>),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Text("none".into()), Into::into)
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Series(v) => v
                .iter()
                .map(|(t, x)| format!("{}:{}", format_float(*t), format_float(*x)))
                .collect::<Vec<_>>()
                .join(";"),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Series(v) => Value::Array(
                v.iter().map(|(t, x)| Value::Array(vec![Cell::Num(*t).json(), Cell::Num(*x).json()])).collect(),
            ),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Default)]
pub struct Artifact {
    meta: Vec<(String, Cell)>,
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
    summary: Vec<(String, Cell)>,
}

impl Artifact {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), ..Self::default() }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Cell>) -> &mut Self {
        self.meta.push((key.into(), value.into()));
        self
    }

    pub fn summary(&mut self, key: &str, value: impl Into<Cell>) -> &mut Self {
        self.summary.push((key.into(), value.into()));
        self
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            s.push_str(&format!("# {k}={}\n", v.csv()));
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(Cell::csv).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        for (k, v) in &self.summary {
            s.push_str(&format!("# {k}={}\n", v.csv()));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let pairs = |items: &[(String, Cell)]| -> Value {
            Value::Object(items.iter().map(|(k, v)| (k.clone(), v.json())).collect::<Map<_, _>>())
        };
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(self.columns.iter().zip(r).map(|(c, v)| (c.clone(), v.json())).collect::<Map<_, _>>())
            })
            .collect();
        let mut root = Map::new();
        root.insert("meta".into(), pairs(&self.meta));
        root.insert("columns".into(), Value::from(self.columns.clone()));
        root.insert("rows".into(), Value::Array(rows));
        root.insert("summary".into(), pairs(&self.summary));
        Value::Object(root)
    }

    pub fn write(&self, path: &Path, format: Format) -> std::io::Result<()> {
        let text = match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut t = serde_json::to_string_pretty(&self.to_json()).expect("json values serialize");
                t.push('\n');
                t
            }
        };
        let mut f = std::fs::File::create(path)?;
        f.write_all(text.as_bytes())
    }
}
