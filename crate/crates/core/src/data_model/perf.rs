//! The `n×m` AUROC table: rows are dataset pairs, columns are detectors.

use std::fmt::Write as _;
use std::path::Path;

use super::access;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceMatrix {
    pair_ids: Vec<String>,
    model_ids: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl PerformanceMatrix {
    pub fn new(pair_ids: Vec<String>, model_ids: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        if pair_ids.is_empty() || model_ids.is_empty() {
            return Err(Error::invalid("performance matrix needs n ≥ 1 and m ≥ 1"));
        }
        check_unique(&pair_ids)?;
        check_unique(&model_ids)?;
        if values.len() != pair_ids.len() {
            return Err(Error::invalid(format!("{} value rows for {} pairs", values.len(), pair_ids.len())));
        }
        for (pid, row) in pair_ids.iter().zip(&values) {
            if row.len() != model_ids.len() {
                return Err(Error::invalid(format!(
                    "row {pid} has {} values for {} models",
                    row.len(),
                    model_ids.len()
                )));
            }
            for (mid, &v) in model_ids.iter().zip(row) {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidAuroc {
                        pair_id: pid.clone(),
                        model_id: mid.clone(),
                        value: v.to_string(),
                    });
                }
            }
        }
        Ok(Self { pair_ids, model_ids, values })
    }

    pub fn pair_ids(&self) -> &[String] {
        &self.pair_ids
    }
    pub fn model_ids(&self) -> &[String] {
        &self.model_ids
    }
    pub fn n_pairs(&self) -> usize {
        self.pair_ids.len()
    }
    pub fn n_models(&self) -> usize {
        self.model_ids.len()
    }
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i]
    }
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    pub fn pair_index(&self, pair_id: &str) -> Result<usize> {
        self.pair_ids
            .iter()
            .position(|p| p == pair_id)
            .ok_or_else(|| Error::invalid(format!("pair {pair_id} not in performance matrix")))
    }

    pub fn row_for(&self, pair_id: &str) -> Result<&[f64]> {
        Ok(self.row(self.pair_index(pair_id)?))
    }

    /// Sub-matrix with the given rows, in the given order.
    pub fn select_rows<S: AsRef<str>>(&self, pair_ids: &[S]) -> Result<Self> {
        let mut ids = Vec::with_capacity(pair_ids.len());
        let mut values = Vec::with_capacity(pair_ids.len());
        for p in pair_ids {
            let i = self.pair_index(p.as_ref())?;
            ids.push(self.pair_ids[i].clone());
            values.push(self.values[i].clone());
        }
        Self::new(ids, self.model_ids.clone(), values)
    }

    pub fn column_means(&self) -> Vec<f64> {
        let n = self.n_pairs() as f64;
        (0..self.n_models()).map(|j| self.values.iter().map(|r| r[j]).sum::<f64>() / n).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("pair_id");
        for m in &self.model_ids {
            out.push(',');
            out.push_str(m);
        }
        out.push('\n');
        for (pid, row) in self.pair_ids.iter().zip(&self.values) {
            out.push_str(pid);
            for v in row {
                let _ = write!(out, ",{v:.6}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str, origin: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| Error::csv(origin, e))?.clone();
        if headers.get(0) != Some("pair_id") {
            return Err(Error::CorruptFile(format!("{origin}: first column must be pair_id")));
        }
        let model_ids: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
        let mut pair_ids = Vec::new();
        let mut values = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::csv(origin, e))?;
            let pid = record.get(0).unwrap_or("").to_string();
            let mut row = Vec::with_capacity(model_ids.len());
            for (j, field) in record.iter().skip(1).enumerate() {
                let v: f64 = field.parse().map_err(|_| Error::InvalidAuroc {
                    pair_id: pid.clone(),
                    model_id: model_ids.get(j).cloned().unwrap_or_default(),
                    value: field.to_string(),
                })?;
                row.push(v);
            }
            pair_ids.push(pid);
            values.push(row);
        }
        Self::new(pair_ids, model_ids, values)
    }
}

fn check_unique(ids: &[String]) -> Result<()> {
    for (i, id) in ids.iter().enumerate() {
        if id.is_empty() {
            return Err(Error::invalid("empty id"));
        }
        if ids[..i].contains(id) {
            return Err(Error::DuplicateId(id.clone()));
        }
    }
    Ok(())
}

pub fn read_performance_matrix(path: &Path) -> Result<PerformanceMatrix> {
    let text = access::read_string(path)?;
    PerformanceMatrix::from_csv(&text, &path.display().to_string())
}

pub fn write_performance_matrix(p: &PerformanceMatrix, path: &Path) -> Result<()> {
    access::write_bytes(path, p.to_csv().as_bytes())
}
