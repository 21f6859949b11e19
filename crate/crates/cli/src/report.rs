//! Self-describing output: JSON documents or CSV with `#` headers.

use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::Format;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub params: Map<String, Value>,
    pub seed: u64,
    pub results: Vec<Value>,
    pub errors: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<String>,
    /// Flat rows for CSV when `results` are nested.
    #[serde(skip)]
    pub table: Option<Vec<Map<String, Value>>>,
    /// Process exit status once the report is written.
    #[serde(skip)]
    pub status: u8,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            params: Map::new(),
            seed,
            results: vec![],
            errors: vec![],
            summary: None,
            table: None,
            status: 0,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.params.insert(
            key.to_string(),
            serde_json::to_value(value).expect("serializable parameter"),
        );
        self
    }

    pub fn row(&mut self, row: Value) {
        self.results.push(row);
    }

    pub fn write<W: Write>(&self, mut out: W, format: Format) -> std::io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, self)?;
                writeln!(out)
            }
            Format::Csv => self.write_csv(out),
        }
    }

    fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# command: {}", self.command)?;
        for (k, v) in &self.params {
            writeln!(out, "# {k}: {}", cell(v))?;
        }
        writeln!(out, "# seed: {}", self.seed)?;
        if let Some(s) = &self.summary {
            writeln!(out, "# summary: {s}")?;
        }
        for e in &self.errors {
            writeln!(out, "# error: {e}")?;
        }
        let rows: Vec<&Map<String, Value>> = match &self.table {
            Some(t) => t.iter().collect(),
            None => self.results.iter().filter_map(Value::as_object).collect(),
        };
        let Some(first) = rows.first() else { return Ok(()) };
        let columns: Vec<&String> = first.keys().collect();
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&columns)?;
        for r in rows {
            w.write_record(columns.iter().map(|c| r.get(*c).map_or(String::new(), cell)))?;
        }
        w.flush()
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
