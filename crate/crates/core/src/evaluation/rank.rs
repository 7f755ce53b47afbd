//! True ranks of selections within a performance row.

use crate::detectors::average_ranks;
use crate::error::{Error, Result};

/// Rank 1 = highest AUROC; tied values share the mean of their positions.
pub fn descending_ranks(row: &[f64]) -> Vec<f64> {
    let neg: Vec<f64> = row.iter().map(|v| -v).collect();
    average_ranks(&neg)
}

pub fn true_rank(row: &[f64], model_ids: &[String], selected: &str) -> Result<f64> {
    let j = model_ids.iter().position(|m| m == selected).ok_or_else(|| Error::UnknownModel(selected.to_string()))?;
    Ok(descending_ranks(row)[j])
}

/// Rank an outside AUROC value would take among the row's detectors
/// (ties count half), clamped to `[1, m]`.
pub fn value_rank(row: &[f64], value: f64) -> f64 {
    let better = row.iter().filter(|&&v| v > value).count() as f64;
    let tied = row.iter().filter(|&&v| v == value).count() as f64;
    (1.0 + better + 0.5 * tied).clamp(1.0, row.len() as f64)
}
