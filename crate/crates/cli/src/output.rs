use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// `{command, params, rows}`; every row carries the same keys, in the order
/// used for the CSV header.
pub struct Document {
    pub command: &'static str,
    pub params: Map<String, Value>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Map<String, Value>>,
}

impl Document {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Document {
            command,
            params: Map::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    pub fn push(&mut self, row: Map<String, Value>) {
        debug_assert!(self.columns.iter().all(|c| row.contains_key(*c)));
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let doc = json!({
                    "command": self.command,
                    "params": self.params,
                    "rows": self.rows,
                });
                Ok(serde_json::to_string_pretty(&doc)? + "\n")
            }
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(self.columns.iter().map(|c| csv_cell(&row[*c])))?;
                }
                Ok(String::from_utf8(w.into_inner()?)?)
            }
        }
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<()> {
        let text = self.render(format)?;
        match out {
            Some(path) => {
                let mut f = File::create(path)
                    .with_context(|| format!("cannot create {}", path.display()))?;
                f.write_all(text.as_bytes())?;
            }
            None => io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(csv_cell).collect::<Vec<_>>().join(","),
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| format!("{k}={}", csv_cell(v)))
            .collect::<Vec<_>>()
            .join(";"),
        other => other.to_string(),
    }
}
