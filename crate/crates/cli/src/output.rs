use std::io::Write;
use std::path::Path;

use serde_json::Value;
use twistlab_core::{Error, Result};

use crate::config::Format;

/// A command's result: the canonical JSON, an optional flat table, and
/// whether every check in it passed.
#[derive(Debug)]
pub struct Report {
    pub json: Value,
    pub csv: Option<String>,
    pub pass: bool,
}

impl Report {
    pub fn new(json: Value, pass: bool) -> Self {
        Report { json, csv: None, pass }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }
}

fn text_lines(v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                out.push_str(&format!("{k}: {x}\n"));
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                text_lines(x, out);
            }
        }
        other => out.push_str(&format!("{other}\n")),
    }
}

pub fn render(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json)
                .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => report
            .csv
            .clone()
            .ok_or_else(|| Error::Config("csv output is only available for flat tables".into())),
        Format::Text => {
            let mut s = String::new();
            text_lines(&report.json, &mut s);
            Ok(s)
        }
    }
}

pub fn emit(text: &str, path: Option<&Path>) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}
