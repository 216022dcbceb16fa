//! Tabular output and atomic file writes.

use std::fmt::Display;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// A CSV table; numbers are written with their shortest round-trip form,
/// so identical inputs give byte-identical files.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<D: Display>(&mut self, row: impl IntoIterator<Item = D>) -> Result<()> {
        let row: Vec<String> = row.into_iter().map(|v| v.to_string()).collect();
        if row.len() != self.header.len() {
            return Err(Error::invalid(format!(
                "row has {} fields, table has {} columns",
                row.len(),
                self.header.len()
            )));
        }
        if row.iter().any(|c| c.contains([',', '\n', '"'])) {
            return Err(Error::invalid("CSV cells may not contain commas, quotes or newlines"));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

/// Writes `bytes` to a temporary file beside `path`, syncs it, then renames
/// it over `path`; readers never observe a partial file.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}
