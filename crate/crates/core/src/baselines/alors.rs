//! Matrix-factorization selection: latent model factors from a truncated SVD
//! of the column-centered performance matrix, with a nearest-neighbour
//! regressor from embeddings to latent pair factors.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{fit_space, squared_distance};
use crate::data_model::PerformanceMatrix;
use crate::detectors::vim::top_eigenvectors;
use crate::error::{Error, Result};
use crate::metafeatures::{DatasetEmbedding, Scaler};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlorsModel {
    pub model_ids: Vec<String>,
    /// `m×r`, one row per model.
    pub latent_v: Vec<Vec<f64>>,
    pub column_means: Vec<f64>,
    /// `n×r`, i.e. `U_r S_r`.
    pub train_latents: Vec<Vec<f64>>,
    pub train_embeddings: Vec<Vec<f64>>,
    pub scaler: Scaler,
    pub k_neighbors: usize,
}

pub fn alors_fit(
    train: &[&DatasetEmbedding],
    p: &PerformanceMatrix,
    rank: Option<usize>,
    k_neighbors: usize,
) -> Result<AlorsModel> {
    let (n, m) = (p.n_pairs(), p.n_models());
    let r = rank.unwrap_or_else(|| 3.min(n.saturating_sub(1)).min(m.saturating_sub(1)));
    if r < 1 || r > n.min(m) {
        return Err(Error::invalid(format!("ALORS rank {r} must be in [1, min(n, m)] for a {n}×{m} matrix")));
    }
    if k_neighbors == 0 {
        return Err(Error::invalid("ALORS needs k_neighbors ≥ 1"));
    }
    let (scaler, train_embeddings) = fit_space(train, p)?;
    let column_means = p.column_means();
    let pc = DMatrix::from_fn(n, m, |i, j| p.value(i, j) - column_means[j]);
    let gram = pc.transpose() * &pc;
    let (_, mut v) = top_eigenvectors(gram, r)?;
    for mut col in v.column_iter_mut() {
        let mut lead = 0;
        for (i, x) in col.iter().enumerate() {
            if x.abs() > col[lead].abs() {
                lead = i;
            }
        }
        if col[lead] < 0.0 {
            col.neg_mut();
        }
    }
    let latents = &pc * &v;
    let rows = |mat: &DMatrix<f64>| (0..mat.nrows()).map(|i| mat.row(i).iter().copied().collect()).collect();
    Ok(AlorsModel {
        model_ids: p.model_ids().to_vec(),
        latent_v: rows(&v),
        column_means,
        train_latents: rows(&latents),
        train_embeddings,
        scaler,
        k_neighbors,
    })
}

impl AlorsModel {
    /// `latent · V_rᵀ + column means`.
    pub fn reconstruct(&self, latent: &[f64]) -> Vec<f64> {
        self.latent_v
            .iter()
            .zip(&self.column_means)
            .map(|(v, mean)| v.iter().zip(latent).map(|(a, b)| a * b).sum::<f64>() + mean)
            .collect()
    }

    pub fn predict(&self, new: &DatasetEmbedding) -> Result<Vec<f64>> {
        let q = self.scaler.transform(new)?;
        let mut order: Vec<(f64, usize)> =
            self.train_embeddings.iter().enumerate().map(|(i, e)| (squared_distance(e, &q), i)).collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let k = self.k_neighbors.min(order.len());
        let r = self.latent_v.first().map_or(0, Vec::len);
        let mut latent = vec![0.0; r];
        for &(_, i) in &order[..k] {
            for (a, v) in latent.iter_mut().zip(&self.train_latents[i]) {
                *a += v / k as f64;
            }
        }
        Ok(self.reconstruct(&latent))
    }

    pub fn select(&self, new: &DatasetEmbedding) -> Result<String> {
        let row = self.predict(new)?;
        let best =
            crate::registry::argmax(&row).ok_or_else(|| Error::Numerical("no finite ALORS prediction".into()))?;
        Ok(self.model_ids[best].clone())
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::emb;
    use super::*;
    use crate::rng::SplitMix64;

    fn rank_one(n: usize, m: usize, seed: u64) -> (Vec<DatasetEmbedding>, PerformanceMatrix, Vec<f64>) {
        let mut rng = SplitMix64::new(seed);
        let a: Vec<f64> = (0..n).map(|i| i as f64 / n as f64 - 0.5).collect();
        let b: Vec<f64> = (0..m).map(|_| rng.uniform(-0.3, 0.3)).collect();
        let mu: Vec<f64> = (0..m).map(|_| rng.uniform(0.4, 0.6)).collect();
        let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..m).map(|j| mu[j] + a[i] * b[j]).collect()).collect();
        let means: Vec<f64> = (0..m).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
        let p = PerformanceMatrix::new(
            (0..n).map(|i| format!("p{i}")).collect(),
            (0..m).map(|j| format!("m{j}")).collect(),
            rows,
        )
        .unwrap();
        let es = a.iter().map(|&x| emb(vec![x, 1.0])).collect();
        (es, p, means)
    }

    #[test]
    fn rank_one_reconstruction() {
        let (es, p, _) = rank_one(8, 5, 1);
        let refs: Vec<_> = es.iter().collect();
        let model = alors_fit(&refs, &p, Some(1), 1).unwrap();
        for (i, lat) in model.train_latents.iter().enumerate() {
            let rec = model.reconstruct(lat);
            for (j, v) in rec.iter().enumerate() {
                assert!((v - p.value(i, j)).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn full_rank_reconstruction() {
        let mut rng = SplitMix64::new(2);
        for (n, m) in [(6, 4), (3, 7)] {
            let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.next_f64()).collect()).collect();
            let p = PerformanceMatrix::new(
                (0..n).map(|i| format!("p{i}")).collect(),
                (0..m).map(|j| format!("m{j}")).collect(),
                rows,
            )
            .unwrap();
            let es: Vec<_> = (0..n).map(|i| emb(vec![i as f64])).collect();
            let refs: Vec<_> = es.iter().collect();
            let model = alors_fit(&refs, &p, Some(n.min(m)), 1).unwrap();
            for (i, e) in es.iter().enumerate() {
                let pred = model.predict(e).unwrap();
                for (j, v) in pred.iter().enumerate() {
                    assert!((v - p.value(i, j)).abs() <= 1e-8, "({n},{m}) cell ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn held_out_argmax_on_rank_one() {
        let (es, p, _) = rank_one(12, 6, 3);
        let train: Vec<usize> = (0..12).filter(|i| i % 4 != 1).collect();
        let ptrain = p.select_rows(&train.iter().map(|&i| p.pair_ids()[i].clone()).collect::<Vec<_>>()).unwrap();
        let refs: Vec<_> = train.iter().map(|&i| &es[i]).collect();
        let model = alors_fit(&refs, &ptrain, Some(1), 2).unwrap();
        for i in (0..12).filter(|i| i % 4 == 1) {
            let want = crate::registry::argmax(p.row(i)).unwrap();
            assert_eq!(model.select(&es[i]).unwrap(), p.model_ids()[want]);
        }
    }

    #[test]
    fn deterministic_and_sized() {
        let (es, p, _) = rank_one(6, 4, 4);
        let refs: Vec<_> = es.iter().collect();
        let a = alors_fit(&refs, &p, None, 3).unwrap();
        let b = alors_fit(&refs, &p, None, 3).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.predict(&es[0]).unwrap().len(), 4);
        assert_eq!(a.latent_v[0].len(), 3);
    }
}
