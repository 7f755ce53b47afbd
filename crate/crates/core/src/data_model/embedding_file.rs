//! Line-oriented embedding container: a JSON header line
//! `{"name":…,"dim":…,"count":…}` followed by `count` comma-separated rows.
//!
//! An optional `ids` array in the header keys rows by id (used for model
//! descriptor files).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::access;
use super::csv_util::format_row;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingHeader {
    pub name: String,
    pub dim: usize,
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ids: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingFile {
    pub header: EmbeddingHeader,
    pub rows: Vec<Vec<f64>>,
}

impl EmbeddingFile {
    pub fn new(name: impl Into<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        let file = Self { header: EmbeddingHeader { name: name.into(), dim, count: rows.len(), ids: None }, rows };
        file.validate()?;
        Ok(file)
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self> {
        self.header.ids = Some(ids);
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let h = &self.header;
        if h.dim == 0 || h.count == 0 {
            return Err(Error::invalid("embedding file needs dim ≥ 1 and count ≥ 1"));
        }
        if self.rows.len() != h.count {
            return Err(Error::CorruptFile(format!(
                "embedding {}: header count {} but {} rows",
                h.name,
                h.count,
                self.rows.len()
            )));
        }
        if let Some(bad) = self.rows.iter().position(|r| r.len() != h.dim) {
            return Err(Error::CorruptFile(format!(
                "embedding {}: row {bad} has width {} (dim {})",
                h.name,
                self.rows[bad].len(),
                h.dim
            )));
        }
        if self.rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::CorruptFile(format!("embedding {}: non-finite value", h.name)));
        }
        if let Some(ids) = &h.ids {
            if ids.len() != h.count {
                return Err(Error::CorruptFile(format!(
                    "embedding {}: {} ids for {} rows",
                    h.name,
                    ids.len(),
                    h.count
                )));
            }
        }
        Ok(())
    }

    /// Arithmetic mean over rows.
    pub fn mean_row(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.header.dim];
        for row in &self.rows {
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v;
            }
        }
        let n = self.rows.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        acc
    }

    pub fn row_by_id(&self, id: &str) -> Option<&[f64]> {
        let ids = self.header.ids.as_ref()?;
        ids.iter().position(|x| x == id).map(|i| self.rows[i].as_slice())
    }

    pub fn to_text(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("header serializes");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format_row(row.iter().copied()));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str, origin: &str) -> Result<Self> {
        let mut lines = text.lines();
        let first = lines.next().ok_or_else(|| Error::CorruptFile(format!("{origin}: empty file")))?;
        let header: EmbeddingHeader =
            serde_json::from_str(first).map_err(|e| Error::CorruptFile(format!("{origin}: bad header: {e}")))?;
        let rows = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split(',')
                    .map(|f| {
                        f.trim().parse::<f64>().map_err(|_| Error::CorruptFile(format!("{origin}: cannot parse {f:?}")))
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let file = Self { header, rows };
        file.validate()?;
        Ok(file)
    }
}

pub fn read_embedding_file(path: &Path) -> Result<EmbeddingFile> {
    EmbeddingFile::from_text(&access::read_string(path)?, &path.display().to_string())
}

pub fn write_embedding_file(file: &EmbeddingFile, path: &Path) -> Result<()> {
    access::write_bytes(path, file.to_text().as_bytes())
}
