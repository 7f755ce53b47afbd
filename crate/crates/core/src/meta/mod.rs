//! The meta-learner: model embeddings, training rows, the boosted
//! meta-predictor, and zero-shot selection.

pub mod gbt;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use gbt::{Gbt, GbtParams, Node, Tree};

use crate::data_model::{access, EmbeddingFile, PerformanceMatrix};
use crate::detectors::average_ranks;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::metafeatures::{DatasetEmbedding, Scaler};
use crate::registry::{argmax, Registry};

pub const PREDICTOR_FORMAT: &str = "m3ood-predictor-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelEmbedding {
    pub model_id: String,
    pub vector: Vec<f64>,
}

/// One-hot by registry index, or the descriptor row keyed by `model_id`.
pub fn model_embedding(
    model_id: &str,
    registry: &Registry,
    descriptors: Option<&EmbeddingFile>,
) -> Result<ModelEmbedding> {
    let idx = registry.index_of(model_id)?;
    let vector = match descriptors {
        None => {
            let mut v = vec![0.0; registry.len()];
            v[idx] = 1.0;
            v
        }
        Some(file) => file
            .row_by_id(model_id)
            .ok_or_else(|| Error::UnknownModel(format!("{model_id} (not in descriptor file {})", file.header.name)))?
            .to_vec(),
    };
    Ok(ModelEmbedding { model_id: model_id.to_string(), vector })
}

pub fn model_embeddings(registry: &Registry, descriptors: Option<&EmbeddingFile>) -> Result<Vec<ModelEmbedding>> {
    registry.ids().iter().map(|id| model_embedding(id, registry, descriptors)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingRow {
    pub pair_id: String,
    pub model_id: String,
    pub x: Vec<f64>,
    pub y: f64,
}

/// Pair-major, registry-minor rows `ψ(D_i) ⊕ φ(M_j) → P[i][j]`.
pub fn assemble_rows(
    embeddings: &BTreeMap<String, Vec<f64>>,
    p: &PerformanceMatrix,
    models: &[ModelEmbedding],
) -> Result<Vec<TrainingRow>> {
    let cols = models
        .iter()
        .map(|m| {
            p.model_ids()
                .iter()
                .position(|id| *id == m.model_id)
                .ok_or_else(|| Error::UnknownModel(format!("{} (not a performance-matrix column)", m.model_id)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(p.n_pairs() * models.len());
    for (i, pair_id) in p.pair_ids().iter().enumerate() {
        let e = embeddings
            .get(pair_id)
            .ok_or_else(|| Error::invalid(format!("no dataset embedding for pair {pair_id}")))?;
        for (m, &j) in models.iter().zip(&cols) {
            let mut x = e.clone();
            x.extend_from_slice(&m.vector);
            rows.push(TrainingRow { pair_id: pair_id.clone(), model_id: m.model_id.clone(), x, y: p.value(i, j) });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetTransform {
    #[default]
    Raw,
    /// `(m − rank)/(m − 1)` of the AUROC within its pair (best → 1).
    PerPairRank,
}

/// Applies the transform to one performance row.
pub fn transform_row(row: &[f64], t: TargetTransform) -> Vec<f64> {
    match t {
        TargetTransform::Raw => row.to_vec(),
        TargetTransform::PerPairRank => {
            let m = row.len() as f64;
            if row.len() < 2 {
                return vec![1.0; row.len()];
            }
            let neg: Vec<f64> = row.iter().map(|v| -v).collect();
            average_ranks(&neg).into_iter().map(|r| (m - r) / (m - 1.0)).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaPredictor {
    pub format: String,
    pub target_transform: TargetTransform,
    pub scaler: Scaler,
    pub models: Vec<ModelEmbedding>,
    pub input_schema: Vec<String>,
    pub gbt: Gbt,
}

pub fn train_meta_predictor(
    embeddings: &BTreeMap<String, DatasetEmbedding>,
    p: &PerformanceMatrix,
    registry: &Registry,
    params: &GbtParams,
    transform: TargetTransform,
    descriptors: Option<&EmbeddingFile>,
    exec: Exec,
) -> Result<MetaPredictor> {
    let train: Vec<&DatasetEmbedding> = p
        .pair_ids()
        .iter()
        .map(|id| embeddings.get(id).ok_or_else(|| Error::invalid(format!("no dataset embedding for pair {id}"))))
        .collect::<Result<_>>()?;
    let scaler = Scaler::fit(&train)?;
    let standardized: BTreeMap<String, Vec<f64>> =
        p.pair_ids().iter().zip(&train).map(|(id, e)| Ok((id.clone(), scaler.transform(e)?))).collect::<Result<_>>()?;
    let models = model_embeddings(registry, descriptors)?;
    let transformed = PerformanceMatrix::new(
        p.pair_ids().to_vec(),
        p.model_ids().to_vec(),
        p.rows().iter().map(|r| transform_row(r, transform)).collect(),
    )?;
    let rows = assemble_rows(&standardized, &transformed, &models)?;
    let x: Vec<Vec<f64>> = rows.iter().map(|r| r.x.clone()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.y).collect();
    let (gbt, _) = Gbt::fit_with_history(&x, &y, params, exec)?;
    let model_dim = models.first().map_or(0, |m| m.vector.len());
    let mut input_schema = scaler.schema.clone();
    input_schema.extend((0..model_dim).map(|k| format!("model_{k}")));
    Ok(MetaPredictor {
        format: PREDICTOR_FORMAT.to_string(),
        target_transform: transform,
        scaler,
        models,
        input_schema,
        gbt,
    })
}

impl MetaPredictor {
    /// Predicted performance of every registry model on a new pair, in
    /// registry order.
    pub fn predict_row(&self, embedding: &DatasetEmbedding, registry: &Registry) -> Result<Vec<f64>> {
        let z = self.scaler.transform(embedding)?;
        registry
            .ids()
            .iter()
            .map(|id| {
                let m = self
                    .models
                    .iter()
                    .find(|m| m.model_id == *id)
                    .ok_or_else(|| Error::UnknownModel(format!("{id} (not known to the predictor)")))?;
                let mut x = z.clone();
                x.extend_from_slice(&m.vector);
                self.gbt.predict(&x)
            })
            .collect()
    }

    /// Zero-shot selection: argmax of the predicted row, ties to the lowest
    /// registry index. Needs only the new pair's embedding.
    pub fn select_model(&self, embedding: &DatasetEmbedding, registry: &Registry) -> Result<String> {
        let row = self.predict_row(embedding, registry)?;
        let best = argmax(&row).ok_or_else(|| Error::Numerical("no finite prediction".into()))?;
        Ok(registry.get(best).to_string())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("predictor serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(text).map_err(|e| Error::json(origin, e))?;
        if p.format != PREDICTOR_FORMAT {
            return Err(Error::invalid(format!("{origin}: unsupported predictor format {:?}", p.format)));
        }
        if p.input_schema.len() != p.gbt.n_features {
            return Err(Error::SchemaMismatch(format!("{origin}: schema/tree input dimension disagree")));
        }
        Ok(p)
    }
}

pub fn write_predictor(p: &MetaPredictor, path: &Path) -> Result<()> {
    access::write_bytes(path, p.to_json().as_bytes())
}

pub fn read_predictor(path: &Path) -> Result<MetaPredictor> {
    MetaPredictor::from_json(&access::read_string(path)?, &path.display().to_string())
}
