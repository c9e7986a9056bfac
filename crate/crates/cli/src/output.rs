//! Output envelopes. Every JSON document and CSV file carries the run
//! parameters, the code version and a SHA-256 of its own payload; nothing
//! time-dependent is written, so identical runs produce identical bytes.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Format, Settings};
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A CSV table: header plus rows of already-formatted cells.
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self::with_columns(columns.iter().map(|c| c.to_string()).collect())
    }

    pub fn with_columns(columns: Vec<String>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn body(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Fixed formatting for floats in CSV cells.
pub fn num(x: f64) -> String {
    format!("{x:.17e}")
}

fn sha256(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    q: u32,
    g: u32,
    cutoff: u32,
    precision: u32,
    content_hash: String,
    result: &'a T,
}

/// Renders `value` (JSON) or `table` (CSV) with the provenance header.
pub fn render<T: Serialize>(command: &str, s: &Settings, value: &T, table: impl FnOnce() -> Table) -> Result<String, CliError> {
    let r = &s.run;
    match s.format {
        Format::Json => {
            let payload = serde_json::to_string(value).map_err(|e| CliError::Output(e.to_string()))?;
            let env = Envelope {
                tool: "ffmoment",
                version: VERSION,
                command,
                q: r.q,
                g: r.g,
                cutoff: r.cutoff,
                precision: r.precision,
                content_hash: sha256(payload.as_bytes()),
                result: value,
            };
            let mut out = serde_json::to_string_pretty(&env).map_err(|e| CliError::Output(e.to_string()))?;
            out.push('\n');
            Ok(out)
        }
        Format::Csv => {
            let body = table().body();
            Ok(format!(
                "# ffmoment {VERSION} command={command} q={} g={} cutoff={} precision={} content_hash={}\n{body}",
                r.q,
                r.g,
                r.cutoff,
                r.precision,
                sha256(body.as_bytes())
            ))
        }
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
            }
            std::fs::write(p, text).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))
        }
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())
                .and_then(|_| so.flush())
                .map_err(|e| CliError::Output(e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_covers_payload_only() {
        let s = Settings::default();
        let a = render("x", &s, &vec![1, 2, 3], || Table::new(&["a"])).unwrap();
        let b = render("x", &s, &vec![1, 2, 3], || Table::new(&["a"])).unwrap();
        assert_eq!(a, b);
        let c = render("x", &s, &vec![1, 2, 4], || Table::new(&["a"])).unwrap();
        let hash = |t: &str| serde_json::from_str::<serde_json::Value>(t).unwrap()["content_hash"].clone();
        assert_ne!(hash(&a), hash(&c));
    }

    #[test]
    fn csv_header_and_rows() {
        let s = Settings {
            format: Format::Csv,
            ..Default::default()
        };
        let text = render("t", &s, &(), || {
            let mut t = Table::new(&["a", "b"]);
            t.push(vec!["1".into(), "2".into()]);
            t
        })
        .unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# ffmoment ") && lines[0].contains("content_hash="));
        assert_eq!(&lines[1..], ["a,b", "1,2"]);
    }
}
