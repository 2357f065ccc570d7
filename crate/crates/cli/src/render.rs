use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Text,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(CliError::Usage(format!("unknown format `{s}` (csv, json or text)"))),
        }
    }
}

/// One command's result: provenance, scalar findings and a table.
#[derive(Debug, Serialize)]
pub struct Payload {
    pub command: String,
    pub metadata: Value,
    pub summary: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Free-form rendering used by `--text` instead of the table.
    #[serde(skip)]
    pub report: Option<String>,
}

impl Payload {
    pub fn new(command: &str, metadata: Value, columns: &[&str]) -> Self {
        Payload {
            command: command.to_string(),
            metadata,
            summary: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            report: None,
        }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    pub fn write(&self, format: Format, out: &mut dyn Write, notes: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                w.flush()?;
                for (k, v) in &self.summary {
                    writeln!(notes, "{k}: {v}")?;
                }
            }
            Format::Json => {
                let summary: serde_json::Map<String, Value> =
                    self.summary.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
                let doc = json!({
                    "command": self.command,
                    "version": env!("CARGO_PKG_VERSION"),
                    "metadata": self.metadata,
                    "summary": summary,
                    "columns": self.columns,
                    "rows": self.rows,
                });
                let text = serde_json::to_string_pretty(&doc).map_err(std::io::Error::other)?;
                writeln!(out, "{text}")?;
            }
            Format::Text => {
                for (k, v) in &self.summary {
                    writeln!(out, "{k}: {v}")?;
                }
                match &self.report {
                    Some(r) => writeln!(out, "{r}")?,
                    None => write_aligned(out, &self.columns, &self.rows)?,
                }
            }
        }
        Ok(())
    }
}

fn write_aligned(out: &mut dyn Write, columns: &[String], rows: &[Vec<String>]) -> std::io::Result<()> {
    let mut width: Vec<usize> = columns.iter().map(String::len).collect();
    for row in rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&width)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(columns))?;
    for row in rows {
        writeln!(out, "{}", line(row))?;
    }
    Ok(())
}
