//! JSON documents and CSV tables. Both carry the tool version, the resolved
//! configuration and the master seed.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const TOOL: &str = "cutdens";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown output format `{other}` (json|csv)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
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

/// Join integer lists as `0;1;1`, so they stay in one CSV field.
pub fn join<T: ToString>(items: &[T]) -> Cell {
    Cell::Text(items.iter().map(ToString::to_string).collect::<Vec<_>>().join(";"))
}

/// Float lists in the same 17-digit form as scalar cells.
pub fn join_floats(items: &[f64]) -> Cell {
    Cell::Text(items.iter().map(|&x| float(x)).collect::<Vec<_>>().join(";"))
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// One header row and one data row.
    pub fn single(pairs: Vec<(&'static str, Cell)>) -> Self {
        let (columns, row): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        Self {
            columns,
            rows: vec![row],
        }
    }
}

/// What a command produces before it is rendered.
pub struct Output {
    pub result: Value,
    pub table: Table,
}

impl Output {
    pub fn new(result: impl Serialize, table: Table) -> Self {
        Self {
            result: serde_json::to_value(result).expect("results serialize to JSON"),
            table,
        }
    }
}

/// The JSON document every run writes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub guards: String,
    pub config: Map<String, Value>,
    pub result: Value,
}

pub fn render(env: &Envelope, table: &Table, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(env).expect("envelope serializes");
            s.push('\n');
            s
        }
        Format::Csv => render_csv(env, table),
    }
}

fn render_csv(env: &Envelope, table: &Table) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# tool: {} {}", env.tool, env.version);
    let _ = writeln!(s, "# command: {}", env.command);
    let _ = writeln!(s, "# seed: {}", env.seed);
    let _ = writeln!(s, "# guards: {}", env.guards);
    let _ = writeln!(
        s,
        "# config: {}",
        serde_json::to_string(&env.config).expect("config serializes")
    );
    s.push_str(&table.columns.join(","));
    s.push('\n');
    for row in &table.rows {
        let fields: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Int(v) => v.to_string(),
                Cell::Float(v) => float(*v),
                Cell::Bool(v) => v.to_string(),
                Cell::Text(t) => quote(t),
            })
            .collect();
        s.push_str(&fields.join(","));
        s.push('\n');
    }
    s
}

fn quote(t: &str) -> String {
    if t.contains([',', '"', '\n']) {
        format!("\"{}\"", t.replace('"', "\"\""))
    } else {
        t.to_string()
    }
}
