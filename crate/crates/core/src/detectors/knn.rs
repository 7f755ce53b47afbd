//! Deep nearest-neighbour detector on L2-normalized features.

use nalgebra::DMatrix;

use crate::data_model::FeatureExport;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    pub train: Vec<Vec<f64>>,
    pub k: usize,
}

/// Unit-normalizes `z`; the zero vector is returned unchanged.
pub fn normalize(z: &[f64]) -> Vec<f64> {
    let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        z.to_vec()
    } else {
        z.iter().map(|v| v / norm).collect()
    }
}

fn rows(m: &DMatrix<f64>) -> impl Iterator<Item = Vec<f64>> + '_ {
    (0..m.nrows()).map(move |i| m.row(i).iter().copied().collect())
}

impl KnnModel {
    pub fn fit(train: &FeatureExport, k: usize) -> Result<Self> {
        let n = train.n_samples();
        if k == 0 || k > n {
            return Err(Error::invalid(format!("kNN needs 1 ≤ k ≤ N, got k={k}, N={n}")));
        }
        Ok(Self { train: rows(&train.features).map(|r| normalize(&r)).collect(), k })
    }

    /// Negative distance to the k-th nearest normalized train feature.
    pub fn score(&self, z: &[f64]) -> f64 {
        let q = normalize(z);
        let mut d: Vec<f64> =
            self.train.iter().map(|t| t.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()).collect();
        let (_, kth, _) = d.select_nth_unstable_by(self.k - 1, f64::total_cmp);
        -kth.sqrt()
    }
}
