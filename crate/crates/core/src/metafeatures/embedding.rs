//! Dataset embeddings: aggregated clip meta-features plus pooled deep
//! embeddings, and the z-score scaler shared by every embedding consumer.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::clip::{clip_feature_names, clip_meta_features, ClipFeatureVector, CLIP_FEATURE_DIM};
use crate::data_model::{
    access, read_embedding_file, read_flow_file, read_video_file, write_embedding_file, DatasetPair, EmbeddingFile,
    Modality,
};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::rng::SplitMix64;

pub const DEFAULT_SAMPLE_BUDGET: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEmbedding {
    pub schema: Vec<String>,
    pub vector: Vec<f64>,
}

impl DatasetEmbedding {
    pub fn new(schema: Vec<String>, vector: Vec<f64>) -> Result<Self> {
        if schema.len() != vector.len() {
            return Err(Error::SchemaMismatch(format!(
                "schema has {} names for {} values",
                schema.len(),
                vector.len()
            )));
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite dataset embedding".into()));
        }
        Ok(Self { schema, vector })
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }
}

/// Per-dimension (mean, population std) over clip vectors, in list order.
fn mean_std(clips: &[ClipFeatureVector]) -> ([f64; CLIP_FEATURE_DIM], [f64; CLIP_FEATURE_DIM]) {
    let n = clips.len() as f64;
    let mut mean = [0.0; CLIP_FEATURE_DIM];
    for c in clips {
        for (m, x) in mean.iter_mut().zip(c.as_slice()) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = [0.0; CLIP_FEATURE_DIM];
    for c in clips {
        for ((v, m), x) in var.iter_mut().zip(&mean).zip(c.as_slice()) {
            *v += (x - m) * (x - m);
        }
    }
    (mean, var.map(|v| (v / n).sqrt()))
}

fn pooled_deep(pair: &DatasetPair, modality: Modality) -> Result<Option<Vec<f64>>> {
    match pair.deep_embedding_path(modality) {
        None => Ok(None),
        Some(p) => Ok(Some(read_embedding_file(&p)?.mean_row())),
    }
}

/// Builds the embedding of one pair from up to `sample_budget` train clips,
/// drawn without replacement by the seeded generator, plus the pair's
/// pre-pooled deep embeddings.
pub fn dataset_embedding(pair: &DatasetPair, sample_budget: usize, seed: u64, exec: Exec) -> Result<DatasetEmbedding> {
    if sample_budget == 0 {
        return Err(Error::invalid("sample budget must be at least 1"));
    }
    let videos = pair.train_clips(Modality::Video);
    let flows = pair.train_clips(Modality::Flow);
    if !videos.is_empty() && videos.len() != flows.len() {
        return Err(Error::invalid(format!(
            "pair {}: {} video clips but {} flow clips",
            pair.pair_id,
            videos.len(),
            flows.len()
        )));
    }
    let mut schema = Vec::new();
    let mut vector = Vec::new();
    if !videos.is_empty() {
        let mut rng = SplitMix64::new(seed);
        let picks = rng.sample_indices(videos.len(), sample_budget.min(videos.len()));
        let clips = exec.try_map_range(picks.len(), |i| {
            let k = picks[i];
            let v = read_video_file(&videos[k])?;
            let f = read_flow_file(&flows[k])?;
            Ok::<_, Error>(clip_meta_features(&v, &f))
        })?;
        let (mean, std) = mean_std(&clips);
        let names = clip_feature_names();
        schema.extend(names.iter().map(|n| format!("meta_mean_{n}")));
        schema.extend(names.iter().map(|n| format!("meta_std_{n}")));
        vector.extend(mean);
        vector.extend(std);
    }
    for (modality, tag) in [(Modality::Video, "video"), (Modality::Flow, "flow")] {
        if let Some(row) = pooled_deep(pair, modality)? {
            schema.extend((0..row.len()).map(|i| format!("deep_{tag}_{i}")));
            vector.extend(row);
        }
    }
    if vector.is_empty() {
        return Err(Error::NoEmbeddableContent(pair.pair_id.clone()));
    }
    DatasetEmbedding::new(schema, vector)
}

/// Writes the embedding as a one-row embedding file named after the pair,
/// with the schema in `<path>.schema.json`.
pub fn write_dataset_embedding(emb: &DatasetEmbedding, name: &str, path: &Path) -> Result<()> {
    let file = EmbeddingFile::new(name, vec![emb.vector.clone()])?;
    write_embedding_file(&file, path)?;
    let mut schema = serde_json::to_string_pretty(&emb.schema).expect("schema serializes");
    schema.push('\n');
    access::write_bytes(&schema_path(path), schema.as_bytes())
}

pub fn read_dataset_embedding(path: &Path) -> Result<(String, DatasetEmbedding)> {
    let file = read_embedding_file(path)?;
    if file.rows.len() != 1 {
        return Err(Error::invalid(format!("{}: dataset embedding must have exactly one row", path.display())));
    }
    let sp = schema_path(path);
    let schema: Vec<String> =
        serde_json::from_str(&access::read_string(&sp)?).map_err(|e| Error::json(sp.display().to_string(), e))?;
    let name = file.header.name.clone();
    let emb = DatasetEmbedding::new(schema, file.rows.into_iter().next().unwrap())?;
    Ok((name, emb))
}

fn schema_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".schema.json");
    s.into()
}

/// Per-dimension z-score parameters fitted on a set of embeddings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub schema: Vec<String>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Scaler {
    pub fn fit(embeddings: &[&DatasetEmbedding]) -> Result<Self> {
        let first = embeddings.first().ok_or_else(|| Error::invalid("cannot standardize an empty embedding list"))?;
        for e in embeddings {
            if e.schema != first.schema {
                return Err(Error::SchemaMismatch("embeddings in one experiment must share a schema".into()));
            }
        }
        let n = embeddings.len() as f64;
        let d = first.dim();
        let mut mean = vec![0.0; d];
        for e in embeddings {
            for (m, x) in mean.iter_mut().zip(&e.vector) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut std = vec![0.0; d];
        for e in embeddings {
            for ((s, m), x) in std.iter_mut().zip(&mean).zip(&e.vector) {
                *s += (x - m) * (x - m);
            }
        }
        for (s, m) in std.iter_mut().zip(&mean) {
            *s = (*s / n).sqrt();
            // Rounding in the mean leaves a residue on constant columns.
            if *s <= 1e-12 * m.abs().max(1.0) {
                *s = 0.0;
            }
        }
        Ok(Self { schema: first.schema.clone(), mean, std })
    }

    pub fn transform(&self, e: &DatasetEmbedding) -> Result<Vec<f64>> {
        if e.schema != self.schema {
            return Err(Error::SchemaMismatch(format!(
                "embedding has {} dimensions, scaler expects {}",
                e.dim(),
                self.schema.len()
            )));
        }
        Ok(e.vector
            .iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(x, (m, s))| if *s == 0.0 { 0.0 } else { (x - m) / s })
            .collect())
    }
}

pub fn standardize(embeddings: &[&DatasetEmbedding]) -> Result<(Vec<Vec<f64>>, Scaler)> {
    let scaler = Scaler::fit(embeddings)?;
    let rows = embeddings.iter().map(|e| scaler.transform(e)).collect::<Result<_>>()?;
    Ok((rows, scaler))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn emb(v: Vec<f64>) -> DatasetEmbedding {
        let schema = (0..v.len()).map(|i| format!("x{i}")).collect();
        DatasetEmbedding::new(schema, v).unwrap()
    }

    #[test]
    fn single_embedding_standardizes_to_zero() {
        let e = emb(vec![3.0, -1.0, 7.5]);
        let (rows, _) = standardize(&[&e]).unwrap();
        assert_eq!(rows, vec![vec![0.0; 3]]);
    }

    #[test]
    fn standardized_moments() {
        let mut rng = SplitMix64::new(77);
        let es: Vec<_> = (0..13).map(|_| emb(vec![rng.normal(5.0, 3.0), 2.0, rng.uniform(-1.0, 1.0)])).collect();
        let refs: Vec<_> = es.iter().collect();
        let (rows, scaler) = standardize(&refs).unwrap();
        for j in 0..3 {
            let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            let m = col.iter().sum::<f64>() / col.len() as f64;
            let s = (col.iter().map(|x| (x - m).powi(2)).sum::<f64>() / col.len() as f64).sqrt();
            assert!(m.abs() <= 1e-9);
            if j == 1 {
                assert!(col.iter().all(|&x| x == 0.0));
            } else {
                assert!((s - 1.0).abs() < 1e-9);
            }
        }
        assert_eq!(scaler.transform(&es[4]).unwrap(), rows[4]);
    }

    #[test]
    fn schema_mismatch_rejected() {
        let a = emb(vec![1.0, 2.0]);
        let b = emb(vec![1.0]);
        assert!(matches!(standardize(&[&a, &b]), Err(Error::SchemaMismatch(_))));
        let (_, scaler) = standardize(&[&a]).unwrap();
        assert!(scaler.transform(&b).is_err());
    }

    #[test]
    fn mean_std_invariant_under_duplication() {
        let mut rng = SplitMix64::new(3);
        let clips: Vec<ClipFeatureVector> =
            (0..3).map(|_| ClipFeatureVector(std::array::from_fn(|_| rng.normal(0.0, 4.0)))).collect();
        let doubled: Vec<_> = clips.iter().chain(clips.iter()).cloned().collect();
        let (m1, s1) = mean_std(&clips);
        let (m2, s2) = mean_std(&doubled);
        for i in 0..CLIP_FEATURE_DIM {
            assert!((m1[i] - m2[i]).abs() < 1e-12);
            assert!((s1[i] - s2[i]).abs() < 1e-12);
        }
    }
}
