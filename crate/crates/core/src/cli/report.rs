use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use super::config::RunConfig;
use crate::error::Result;

/// What a command hands back to the front end.
#[derive(Debug, Default)]
pub struct Outcome {
    pub results: Value,
    pub seeds: Vec<u64>,
    /// Human-readable lines for standard output.
    pub lines: Vec<String>,
    pub table: Table,
    /// False when a `verify` check failed.
    pub passed: bool,
}

#[derive(Debug, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    version: &'a str,
    inputs: &'a RunConfig,
    results: &'a Value,
    seeds: &'a [u64],
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
}

pub fn write_report(path: &Path, command: &str, inputs: &RunConfig, outcome: &Outcome) -> Result<()> {
    let timestamp = if inputs.no_timestamp == Some(true) {
        None
    } else {
        SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
    };
    let report = Report {
        command,
        version: env!("CARGO_PKG_VERSION"),
        inputs,
        results: &outcome.results,
        seeds: &outcome.seeds,
        timestamp,
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Ten significant digits, positional notation for moderate magnitudes.
pub fn fmt10(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..10).contains(&e) {
        let decimals = (9 - e).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.9e}")
    }
}

/// `re +/- im i` with [`fmt10`] parts; signed zeros print as zero.
pub fn fmt_complex(z: num_complex::Complex64) -> String {
    let re = if z.re == 0.0 { 0.0 } else { z.re };
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{} {sign} {}i", fmt10(re), fmt10(z.im.abs()))
}

/// Shortest round-trip representation, used in tables.
pub fn num(x: f64) -> String {
    format!("{x}")
}
