//! NDJSON record types for norms and diagnostics.
//!
//! One JSON object per line, schema stable across runs so downstream tooling
//! can diff outputs.  Numbers are serialized in shortest round-trip form (the
//! serde_json default), so re-parsing a record reproduces every f64 bit for
//! bit.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lp::{BesovNorm, ShellRange};

/// A single norm evaluation attached to an identifiable field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormRecord {
    /// What was measured, e.g. `"datum"`, `"u(t=0.25)"`, `"diff m=3"`.
    pub field_id: String,
    /// Which norm, e.g. `"besov"`, `"x01"`, `"l2"`, `"strichartz-l2l6"`.
    pub norm_name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shell_range: Option<ShellRange>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
}

impl NormRecord {
    pub fn new(field_id: impl Into<String>, norm_name: impl Into<String>, value: f64) -> Self {
        NormRecord {
            field_id: field_id.into(),
            norm_name: norm_name.into(),
            value,
            params: None,
            shell_range: None,
            caveat: None,
        }
    }

    pub fn with_params(mut self, params: serde_json::Value) -> Self {
        self.params = Some(params);
        self
    }

    pub fn with_shell_range(mut self, range: ShellRange) -> Self {
        self.shell_range = Some(range);
        self
    }

    pub fn with_caveat(mut self, caveat: impl Into<String>) -> Self {
        self.caveat = Some(caveat.into());
        self
    }
}

/// Full record of a Besov evaluation, shells included.
pub fn besov_record(field_id: impl Into<String>, norm: &BesovNorm) -> NormRecord {
    NormRecord::new(field_id, "besov", norm.value)
        .with_params(serde_json::json!({
            "s": norm.params.s,
            "q": norm.params.q,
            "shell_norms": norm.shell_norms,
            "removed_mean": [norm.removed_mean.re, norm.removed_mean.im],
        }))
        .with_shell_range(norm.shell_range)
}

/// Serialize any record as one NDJSON line (no trailing newline).
pub fn to_ndjson_line<T: Serialize>(record: &T) -> Result<String> {
    let line = serde_json::to_string(record)?;
    debug_assert!(!line.contains('\n'), "serialized record spans lines");
    Ok(line)
}

/// Write records to a file, one per line.
pub fn write_ndjson<'a, T, I>(path: &std::path::Path, records: I) -> Result<()>
where
    T: Serialize + 'a,
    I: IntoIterator<Item = &'a T>,
{
    let mut out = String::new();
    for r in records {
        out.push_str(&to_ndjson_line(r)?);
        out.push('\n');
    }
    Ok(std::fs::write(path, out)?)
}

/// Parse an NDJSON file written by [`write_ndjson`].
pub fn read_ndjson<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<Vec<T>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(line)?);
    }
    Ok(out)
}
