//! Non-neural selection baselines.
//!
//! Distance-based baselines work in the z-scored embedding space of their
//! meta-train pairs; the fitted scaler travels with each model.

mod alors;
mod isac;

pub use alors::{alors_fit, AlorsModel};
pub use isac::{default_isac_k, isac_fit, IsacModel};

use crate::data_model::PerformanceMatrix;
use crate::error::{Error, Result};
use crate::metafeatures::{DatasetEmbedding, Scaler};
use crate::registry::{argmax, Registry};
use crate::rng::splitmix64;

/// Column with the largest mean; ties to the lowest index.
pub fn global_best(p: &PerformanceMatrix) -> String {
    let means = p.column_means();
    p.model_ids()[argmax(&means).expect("nonempty matrix")].clone()
}

/// Row argmax of the performance matrix, as a model id.
pub(crate) fn row_best(p: &PerformanceMatrix, i: usize) -> String {
    p.model_ids()[argmax(p.row(i)).expect("nonempty row")].clone()
}

/// `registry[splitmix64(seed, call_index) mod m]`.
pub fn random_select(registry: &Registry, seed: u64, call_index: u64) -> String {
    let m = registry.len() as u64;
    registry.get((splitmix64(seed, call_index) % m) as usize).to_string()
}

/// Random selection with an explicit call counter.
#[derive(Debug, Clone)]
pub struct RandomSelector {
    pub seed: u64,
    calls: u64,
}

impl RandomSelector {
    pub fn new(seed: u64) -> Self {
        Self { seed, calls: 0 }
    }

    pub fn select(&mut self, registry: &Registry) -> String {
        let id = random_select(registry, self.seed, self.calls);
        self.calls += 1;
        id
    }
}

/// Z-normalizes each detector's scores (constant detectors contribute
/// zeros) and averages them elementwise.
pub fn mega_ensemble_scores(scores: &[&[f64]]) -> Result<Vec<f64>> {
    let first = scores.first().ok_or_else(|| Error::invalid("mega-ensemble needs at least one detector"))?;
    let n = first.len();
    if scores.iter().any(|s| s.len() != n) {
        return Err(Error::invalid("mega-ensemble score vectors differ in length"));
    }
    let mut out = vec![0.0; n];
    for s in scores {
        let mean = s.iter().sum::<f64>() / n as f64;
        let std = (s.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64).sqrt();
        if std <= 1e-12 * mean.abs().max(1.0) {
            continue;
        }
        for (o, v) in out.iter_mut().zip(s.iter()) {
            *o += (v - mean) / std;
        }
    }
    let k = scores.len() as f64;
    out.iter_mut().for_each(|o| *o /= k);
    Ok(out)
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Standardizes the meta-train embeddings, returning the scaler and rows.
pub(crate) fn fit_space(train: &[&DatasetEmbedding], p: &PerformanceMatrix) -> Result<(Scaler, Vec<Vec<f64>>)> {
    if train.len() != p.n_pairs() {
        return Err(Error::invalid(format!("{} embeddings for {} performance rows", train.len(), p.n_pairs())));
    }
    let scaler = Scaler::fit(train)?;
    let rows = train.iter().map(|e| scaler.transform(e)).collect::<Result<_>>()?;
    Ok((scaler, rows))
}

/// Index of the nearest row; ties to the lowest index.
pub(crate) fn nearest(rows: &[Vec<f64>], q: &[f64]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, r) in rows.iter().enumerate() {
        let d = squared_distance(r, q);
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

/// Nearest meta-train pair (1NN in standardized space) and its best model.
pub fn as_select(train: &[&DatasetEmbedding], p: &PerformanceMatrix, new: &DatasetEmbedding) -> Result<String> {
    let (scaler, rows) = fit_space(train, p)?;
    let q = scaler.transform(new)?;
    Ok(row_best(p, nearest(&rows, &q)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::auroc;

    pub(crate) fn emb(v: Vec<f64>) -> DatasetEmbedding {
        DatasetEmbedding::new((0..v.len()).map(|i| format!("f{i}")).collect(), v).unwrap()
    }

    fn matrix(rows: Vec<Vec<f64>>) -> PerformanceMatrix {
        let m = rows[0].len();
        PerformanceMatrix::new(
            (0..rows.len()).map(|i| format!("p{i}")).collect(),
            (0..m).map(|j| format!("m{j}")).collect(),
            rows,
        )
        .unwrap()
    }

    #[test]
    fn global_best_rules() {
        assert_eq!(global_best(&matrix(vec![vec![0.1, 0.9, 0.3]])), "m1");
        assert_eq!(global_best(&matrix(vec![vec![0.5; 4], vec![0.5; 4]])), "m0");
        let a = matrix(vec![vec![0.2, 0.8], vec![0.9, 0.3], vec![0.6, 0.6]]);
        let b = matrix(vec![vec![0.6, 0.6], vec![0.2, 0.8], vec![0.9, 0.3]]);
        assert_eq!(global_best(&a), global_best(&b));
    }

    #[test]
    fn random_is_reproducible_and_uniform() {
        let r = Registry::detectors();
        assert_eq!(random_select(&r, 42, 7), random_select(&r, 42, 7));
        let mut counts = std::collections::BTreeMap::new();
        let mut sel = RandomSelector::new(42);
        for _ in 0..9000 {
            *counts.entry(sel.select(&r)).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 9);
        for (_, c) in counts {
            assert!((c as f64 / 9000.0 - 1.0 / 9.0).abs() <= 0.02);
        }
        let one = Registry::new(vec!["only".into()]).unwrap();
        assert!((0..20).all(|i| random_select(&one, 42, i) == "only"));
    }

    #[test]
    fn mega_ensemble_rules() {
        let s = [1.0, 2.0, 4.0, 7.0];
        let e = mega_ensemble_scores(&[&s, &s]).unwrap();
        let single = mega_ensemble_scores(&[&s]).unwrap();
        assert_eq!(e, single);
        let flat = [3.0; 4];
        let with_flat = mega_ensemble_scores(&[&s, &flat]).unwrap();
        for (a, b) in with_flat.iter().zip(&single) {
            assert!((a - b / 2.0).abs() < 1e-15);
        }
        let labels = [true, true, false, false];
        let a = [0.0, 1.0, 5.0, 6.0];
        let b = [-3.0, -2.0, 10.0, 40.0];
        assert_eq!(auroc(&mega_ensemble_scores(&[&a, &b]).unwrap(), &labels).unwrap(), 1.0);
        assert!(mega_ensemble_scores(&[&a, &s[..3]]).is_err());
    }

    #[test]
    fn mega_ensemble_affine_invariance() {
        let mut rng = crate::rng::SplitMix64::new(31);
        let labels: Vec<bool> = (0..50).map(|i| i % 3 == 0).collect();
        let a: Vec<f64> = (0..50).map(|_| rng.normal(0.0, 1.0)).collect();
        let b: Vec<f64> = (0..50).map(|_| rng.normal(0.0, 1.0)).collect();
        let a2: Vec<f64> = a.iter().map(|v| 7.5 * v - 3.0).collect();
        let b2: Vec<f64> = b.iter().map(|v| 0.01 * v + 100.0).collect();
        let x = auroc(&mega_ensemble_scores(&[&a, &b]).unwrap(), &labels).unwrap();
        let y = auroc(&mega_ensemble_scores(&[&a2, &b2]).unwrap(), &labels).unwrap();
        assert!((x - y).abs() <= 1e-12);
    }

    #[test]
    fn as_rules() {
        let p = matrix(vec![vec![0.9, 0.1], vec![0.2, 0.8], vec![0.4, 0.6]]);
        let es = [emb(vec![0.0, 0.0]), emb(vec![10.0, 0.0]), emb(vec![0.0, 10.0])];
        let refs: Vec<_> = es.iter().collect();
        assert_eq!(as_select(&refs, &p, &es[1]).unwrap(), "m1");
        assert_eq!(as_select(&refs, &p, &es[0]).unwrap(), "m0");
        // equidistant from pairs 1 and 2 → pair 1
        assert_eq!(as_select(&refs, &p, &emb(vec![10.0, 10.0])).unwrap(), "m1");
        // joint permutation of (embeddings, rows)
        let p2 = matrix(vec![vec![0.4, 0.6], vec![0.9, 0.1], vec![0.2, 0.8]]);
        let refs2 = vec![&es[2], &es[0], &es[1]];
        for q in [emb(vec![1.0, 2.0]), emb(vec![9.0, 1.0]), emb(vec![-1.0, 8.0])] {
            assert_eq!(as_select(&refs, &p, &q).unwrap(), as_select(&refs2, &p2, &q).unwrap());
        }
    }
}
