//! Cluster-then-best selection with seeded k-means++.

use serde::{Deserialize, Serialize};

use super::{fit_space, global_best, nearest, squared_distance};
use crate::data_model::PerformanceMatrix;
use crate::error::{Error, Result};
use crate::metafeatures::{DatasetEmbedding, Scaler};
use crate::registry::argmax;
use crate::rng::SplitMix64;

const MAX_ITERS: usize = 100;
const SHIFT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsacModel {
    pub centroids: Vec<Vec<f64>>,
    pub cluster_best: Vec<String>,
    pub scaler: Scaler,
    /// Within-cluster sum of squares after each assignment step.
    pub objective: Vec<f64>,
}

/// `clamp(⌈√(n/2)⌉, 2, n)`.
pub fn default_isac_k(n: usize) -> usize {
    ((n as f64 / 2.0).sqrt().ceil() as usize).clamp(2.min(n), n)
}

fn init_plus_plus(rows: &[Vec<f64>], k: usize, rng: &mut SplitMix64) -> Vec<Vec<f64>> {
    let mut centroids = vec![rows[rng.below(rows.len())].clone()];
    while centroids.len() < k {
        let d2: Vec<f64> = rows
            .iter()
            .map(|r| centroids.iter().map(|c| squared_distance(r, c)).fold(f64::INFINITY, f64::min))
            .collect();
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let u = rng.next_f64() * total;
            let mut acc = 0.0;
            let mut chosen = d2.len() - 1;
            for (i, d) in d2.iter().enumerate() {
                acc += d;
                if acc > u && *d > 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.below(rows.len())
        };
        centroids.push(rows[pick].clone());
    }
    centroids
}

fn assign(rows: &[Vec<f64>], centroids: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let labels: Vec<usize> = rows.iter().map(|r| nearest(centroids, r)).collect();
    let wcss = rows.iter().zip(&labels).map(|(r, &l)| squared_distance(r, &centroids[l])).sum();
    (labels, wcss)
}

pub fn isac_fit(train: &[&DatasetEmbedding], p: &PerformanceMatrix, k: Option<usize>, seed: u64) -> Result<IsacModel> {
    let n = train.len();
    if n < 2 {
        return Err(Error::invalid("ISAC needs at least two meta-train pairs"));
    }
    let k = k.unwrap_or_else(|| default_isac_k(n));
    if k == 0 || k > n {
        return Err(Error::invalid(format!("ISAC k={k} must be in [1, {n}]")));
    }
    let (scaler, rows) = fit_space(train, p)?;
    let mut rng = SplitMix64::new(seed);
    let mut centroids = init_plus_plus(&rows, k, &mut rng);
    let mut objective = Vec::new();
    let mut labels;
    let mut iters = 0;
    loop {
        let (l, wcss) = assign(&rows, &centroids);
        labels = l;
        objective.push(wcss);
        iters += 1;
        let mut shift: f64 = 0.0;
        for (c, centroid) in centroids.iter_mut().enumerate() {
            let members: Vec<&Vec<f64>> = rows.iter().zip(&labels).filter(|(_, &l)| l == c).map(|(r, _)| r).collect();
            if members.is_empty() {
                continue;
            }
            let mut mean = vec![0.0; centroid.len()];
            for m in &members {
                for (a, v) in mean.iter_mut().zip(m.iter()) {
                    *a += v;
                }
            }
            mean.iter_mut().for_each(|a| *a /= members.len() as f64);
            shift = shift.max(squared_distance(centroid, &mean).sqrt());
            *centroid = mean;
        }
        if shift < SHIFT_TOL || iters >= MAX_ITERS {
            break;
        }
    }
    let (final_labels, wcss) = assign(&rows, &centroids);
    labels = final_labels;
    objective.push(wcss);
    let fallback = global_best(p);
    let cluster_best = (0..k)
        .map(|c| {
            let members: Vec<usize> = (0..n).filter(|&i| labels[i] == c).collect();
            if members.is_empty() {
                return fallback.clone();
            }
            let m = p.n_models();
            let means: Vec<f64> =
                (0..m).map(|j| members.iter().map(|&i| p.value(i, j)).sum::<f64>() / members.len() as f64).collect();
            p.model_ids()[argmax(&means).expect("nonempty")].clone()
        })
        .collect();
    Ok(IsacModel { centroids, cluster_best, scaler, objective })
}

impl IsacModel {
    pub fn select(&self, new: &DatasetEmbedding) -> Result<String> {
        let q = self.scaler.transform(new)?;
        Ok(self.cluster_best[nearest(&self.centroids, &q)].clone())
    }
}
