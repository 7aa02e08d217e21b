//! Command reports: one data model, rendered as aligned text or as JSON.
//!
//! Structured schema (`galstrat-report/1`):
//!
//! ```text
//! {
//!   "schema":  "galstrat-report/1",
//!   "command": "<subcommand>",
//!   "inputs":  { "<flag>": "<value>", .. },
//!   "results": { "<key>": "<value>", .. },
//!   "tables":  [ { "name": .., "columns": [..], "rows": [[..], ..] }, .. ],
//!   "budget":  "<evaluation ceiling>",
//!   "timing_ms": "<wall time>"          // only with --timing
//! }
//! ```
//!
//! Every value is a string: integers in decimal, rationals as `num/den`, booleans
//! as `true`/`false`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "galstrat-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Structured,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(Format::Text),
            "structured" | "json" => Ok(Format::Structured),
            _ => Err(format!("unknown format `{s}` (expected text or structured)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub results: BTreeMap<String, String>,
    pub tables: Vec<Table>,
    pub budget: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<String>,
}

impl Report {
    pub fn new(command: &str, budget: u128) -> Self {
        Report {
            schema: SCHEMA.to_string(),
            command: command.to_string(),
            inputs: BTreeMap::new(),
            results: BTreeMap::new(),
            tables: Vec::new(),
            budget: budget.to_string(),
            timing_ms: None,
        }
    }

    pub fn input(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn result(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.results.insert(key.to_string(), value.to_string());
        self
    }

    pub fn table(&mut self, name: &str, columns: &[&str], rows: Vec<Vec<String>>) -> &mut Self {
        self.tables.push(Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        });
        self
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Structured => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => self.to_text(),
        }
    }

    pub fn parse_structured(text: &str) -> Result<Report, serde_json::Error> {
        serde_json::from_str(text)
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        let mut pairs: Vec<(String, &String)> = vec![("command".to_string(), &self.command)];
        pairs.extend(self.inputs.iter().map(|(k, v)| (format!("input.{k}"), v)));
        pairs.extend(self.results.iter().map(|(k, v)| (format!("result.{k}"), v)));
        pairs.push(("budget".to_string(), &self.budget));
        if let Some(t) = &self.timing_ms {
            pairs.push(("timing_ms".to_string(), t));
        }
        let width = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &pairs {
            let _ = writeln!(out, "{k:<width$}  {v}");
        }
        for t in &self.tables {
            let _ = writeln!(out, "\n[{}] {} row(s)", t.name, t.rows.len());
            let mut widths: Vec<usize> = t.columns.iter().map(String::len).collect();
            for row in &t.rows {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.len());
                }
            }
            let line = |cells: &[String]| {
                let padded: Vec<String> =
                    cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
                padded.join("  ").trim_end().to_string()
            };
            let _ = writeln!(out, "{}", line(&t.columns));
            let _ = writeln!(out, "{}", line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>()));
            for row in &t.rows {
                let _ = writeln!(out, "{}", line(row));
            }
        }
        out
    }
}
