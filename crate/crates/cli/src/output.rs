use std::fs;
use std::io::Write;

use anyhow::{Context, Result};
use serde_json::Value;

/// A flat table for `--csv`.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// What a subcommand produced. `pass == false` maps to exit code 1.
pub struct Outcome {
    pub report: Value,
    pub pass: bool,
    pub table: Option<Table>,
}

impl Outcome {
    pub fn ok(report: Value) -> Self {
        Outcome { report, pass: true, table: None }
    }

    pub fn checked(report: Value, pass: bool) -> Self {
        Outcome { report, pass, table: None }
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }
}

pub fn status(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

pub fn write_json(report: &Value, out: Option<&str>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {path}")),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn write_csv(table: &Table, path: &str) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {path}"))?;
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}
