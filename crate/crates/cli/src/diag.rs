//! Machine-readable row diagnostics: one JSON line per rejected input row.

use std::io::Write;

use serde::Serialize;

use crate::errors::{CliError, CliResult};

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Diagnostic {
    pub file: String,
    /// 1-based line number in the source file; 0 for file-level problems.
    pub line: u64,
    pub message: String,
}

/// Collects per-row rejections for one parse pass. A run continues with the
/// surviving rows unless the bad share reaches 1% (or the header itself is
/// bad, which is fatal immediately at the call site).
#[derive(Debug, Default)]
pub struct Diagnostics {
    pub entries: Vec<Diagnostic>,
}

/// Bad-row share at which a parse aborts.
pub const FATAL_BAD_ROW_SHARE: f64 = 0.01;

impl Diagnostics {
    pub fn push(&mut self, file: &str, line: u64, message: impl Into<String>) {
        self.entries.push(Diagnostic { file: file.to_string(), line, message: message.into() });
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn merge(&mut self, other: Diagnostics) {
        self.entries.extend(other.entries);
    }

    /// JSON lines, one per diagnostic.
    pub fn emit(&self, mut w: impl Write) -> std::io::Result<()> {
        for d in &self.entries {
            serde_json::to_writer(&mut w, d)?;
            writeln!(w)?;
        }
        Ok(())
    }

    /// Errors out if the rejected share of `total_rows` reaches the fatal
    /// threshold.
    pub fn check_fatal(&self, file: &str, total_rows: usize) -> CliResult<()> {
        let bad = self.entries.iter().filter(|d| d.file == file).count();
        if total_rows > 0 && bad as f64 >= FATAL_BAD_ROW_SHARE * total_rows as f64 && bad > 0 {
            return Err(CliError::Validation(anyhow::anyhow!(
                "{file}: {bad} of {total_rows} rows rejected (>= {:.0}%); see diagnostics",
                100.0 * FATAL_BAD_ROW_SHARE
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emits_json_lines() {
        let mut d = Diagnostics::default();
        d.push("loans.csv", 17, "negative amount");
        d.push("loans.csv", 21, "bad doc_type");
        let mut out = Vec::new();
        d.emit(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let v: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(v["line"], 17);
        assert_eq!(v["file"], "loans.csv");
    }

    #[test]
    fn fatal_at_one_percent() {
        let mut d = Diagnostics::default();
        d.push("x.csv", 1, "bad");
        assert!(d.check_fatal("x.csv", 99).is_err());
        assert!(d.check_fatal("x.csv", 101).is_ok());
        assert!(d.check_fatal("other.csv", 10).is_ok());
    }
}
