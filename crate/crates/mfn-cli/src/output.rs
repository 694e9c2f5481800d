//! Table rendering for the three output formats. Machine formats print
//! floats with 17 significant digits (CSV) or shortest round-trip
//! (JSON); human tables use 6 significant digits.

use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (expected table, csv, or json)")),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn opt_float(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

/// 17 significant digits, locale-free.
fn fmt_machine(v: f64) -> String {
    format!("{v:.16e}")
}

/// 6 significant digits with trailing zeros trimmed.
pub fn fmt_human(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    let s = if (1e-4..1e7).contains(&a) {
        let int_digits = if a >= 1.0 {
            a.log10().floor() as i32 + 1
        } else {
            0
        };
        let decimals = (6 - int_digits).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        return format!("{v:.5e}");
    };
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

/// A rectangular result table plus the metadata header used by JSON.
pub struct TableOut {
    pub command: String,
    pub seed: Option<u64>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra `key: value` lines shown after human tables and placed in a
    /// `summary` object in JSON; empty for most commands.
    pub summary: Vec<(String, Cell)>,
}

impl TableOut {
    pub fn new(command: &str, seed: Option<u64>, columns: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            seed,
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
            Format::Table => self.render_table(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(v) => v.to_string(),
                    Cell::Float(v) => fmt_machine(*v),
                    Cell::Text(s) => s.clone(),
                    Cell::Bool(b) => b.to_string(),
                    Cell::Empty => String::new(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    fn render_json(&self) -> String {
        use serde_json::{json, Map, Value};
        let cell_value = |c: &Cell| -> Value {
            match c {
                Cell::Int(v) => json!(v),
                Cell::Float(v) => json!(v),
                Cell::Text(s) => json!(s),
                Cell::Bool(b) => json!(b),
                Cell::Empty => Value::Null,
            }
        };
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    obj.insert(name.clone(), cell_value(cell));
                }
                Value::Object(obj)
            })
            .collect();
        let mut root = Map::new();
        root.insert(
            "meta".into(),
            json!({
                "command": self.command,
                "version": env!("CARGO_PKG_VERSION"),
                "seed": self.seed,
            }),
        );
        root.insert("rows".into(), Value::Array(rows));
        if !self.summary.is_empty() {
            let mut obj = Map::new();
            for (k, cell) in &self.summary {
                obj.insert(k.clone(), cell_value(cell));
            }
            root.insert("summary".into(), Value::Object(obj));
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(root)).unwrap();
        text.push('\n');
        text
    }

    fn render_table(&self) -> String {
        let fmt_cell = |c: &Cell| -> String {
            match c {
                Cell::Int(v) => v.to_string(),
                Cell::Float(v) => fmt_human(*v),
                Cell::Text(s) => s.clone(),
                Cell::Bool(b) => b.to_string(),
                Cell::Empty => "-".to_string(),
            }
        };
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
        let rendered: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(j, c)| {
                        let s = fmt_cell(c);
                        widths[j] = widths[j].max(s.len());
                        s
                    })
                    .collect()
            })
            .collect();
        let mut out = String::new();
        let header: Vec<String> = self
            .columns
            .iter()
            .enumerate()
            .map(|(j, c)| format!("{c:>width$}", width = widths[j]))
            .collect();
        let _ = writeln!(out, "{}", header.join("  "));
        for row in rendered {
            let line: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(j, s)| format!("{s:>width$}", width = widths[j]))
                .collect();
            let _ = writeln!(out, "{}", line.join("  "));
        }
        for (k, cell) in &self.summary {
            let _ = writeln!(out, "{k}: {}", fmt_cell(cell));
        }
        out
    }
}
