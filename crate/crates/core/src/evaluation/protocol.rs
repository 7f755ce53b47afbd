//! Split-driven comparison of every selector on held-out pairs.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::rank::{true_rank, value_rank};
use super::report::{SelectionRecord, SelectionResult};
use crate::baselines::{alors_fit, as_select, global_best, isac_fit, mega_ensemble_scores, RandomSelector};
use crate::data_model::{DatasetPair, EmbeddingFile, ExportRole, PerformanceMatrix, SplitSpec};
use crate::detectors::{auroc, read_score_file};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::meta::{train_meta_predictor, GbtParams, TargetTransform};
use crate::metafeatures::DatasetEmbedding;
use crate::registry::{argmax, Registry};
use crate::rng::SplitMix64;

pub const ORACLE: &str = "Oracle";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MethodsConfig {
    pub gbt: GbtParams,
    pub target_transform: TargetTransform,
    pub random_seed: u64,
    pub isac_k: Option<usize>,
    pub isac_seed: u64,
    pub alors_rank: Option<usize>,
    pub alors_neighbors: usize,
    /// Detectors reported as fixed, always-the-same selections.
    pub fixed_detectors: Vec<String>,
}

impl Default for MethodsConfig {
    fn default() -> Self {
        Self {
            gbt: GbtParams::default(),
            target_transform: TargetTransform::Raw,
            random_seed: 42,
            isac_k: None,
            isac_seed: 0,
            alors_rank: None,
            alors_neighbors: 3,
            fixed_detectors: vec!["MSP".into(), "Mahalanobis".into()],
        }
    }
}

/// Where the mega-ensemble finds per-detector test scores and test labels.
pub struct EnsembleSource<'a> {
    pub score_dir: &'a Path,
    pub pairs: &'a BTreeMap<String, DatasetPair>,
}

pub type LlmHook<'a> = &'a (dyn Fn(&str) -> Result<String> + Sync);

pub struct EvalInputs<'a> {
    pub p: &'a PerformanceMatrix,
    pub embeddings: &'a BTreeMap<String, DatasetEmbedding>,
    pub split: &'a SplitSpec,
    pub registry: &'a Registry,
    pub descriptors: Option<&'a EmbeddingFile>,
    pub ensemble: Option<EnsembleSource<'a>>,
    /// Maps a test pair id to the LLM's pick.
    pub llm: Option<LlmHook<'a>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub results: Vec<SelectionResult>,
    /// `(method, reason)` for optional methods that failed.
    pub skipped: Vec<(String, String)>,
}

impl Evaluation {
    pub fn method(&self, name: &str) -> Option<&SelectionResult> {
        self.results.iter().find(|r| r.method == name)
    }
}

/// Holds out `⌈fraction·n⌉` pairs (at least one, at most n−1) drawn with the
/// seeded generator.
pub fn random_split(pair_ids: &[String], test_fraction: f64, seed: u64) -> Result<SplitSpec> {
    let n = pair_ids.len();
    if n < 2 {
        return Err(Error::invalid("a split needs at least two pairs"));
    }
    let k = ((n as f64 * test_fraction).ceil() as usize).clamp(1, n - 1);
    let test = SplitMix64::new(seed).sample_indices(n, k);
    let (mut train_ids, mut test_ids) = (Vec::new(), Vec::new());
    for (i, id) in pair_ids.iter().enumerate() {
        if test.binary_search(&i).is_ok() {
            test_ids.push(id.clone());
        } else {
            train_ids.push(id.clone());
        }
    }
    Ok(SplitSpec { train_pair_ids: train_ids, test_pair_ids: test_ids })
}

fn embedding<'a>(inputs: &'a EvalInputs, id: &str) -> Result<&'a DatasetEmbedding> {
    inputs.embeddings.get(id).ok_or_else(|| Error::invalid(format!("no dataset embedding for pair {id}")))
}

/// AUROC of the z-normalized average of every registry detector's test
/// scores on one pair.
pub fn ensemble_auroc(source: &EnsembleSource, pair_id: &str, registry: &Registry) -> Result<f64> {
    let pair = source.pairs.get(pair_id).ok_or_else(|| Error::invalid(format!("no manifest for pair {pair_id}")))?;
    let scores = registry
        .ids()
        .iter()
        .map(|id| read_score_file(&source.score_dir.join(pair_id).join(format!("{id}.csv"))))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&[f64]> = scores.iter().map(Vec::as_slice).collect();
    let combined = mega_ensemble_scores(&refs)?;
    let test = pair.load_export(ExportRole::Test)?;
    let labels = test.ood_labels.as_ref().ok_or_else(|| Error::MissingLabels("test export needs ood_label".into()))?;
    auroc(&combined, labels)
}

pub fn evaluate_selectors(inputs: &EvalInputs, config: &MethodsConfig, exec: Exec) -> Result<Evaluation> {
    let split = inputs.split;
    split.validate(inputs.p)?;
    let p_train = inputs.p.select_rows(&split.train_pair_ids)?;
    let train_emb: Vec<&DatasetEmbedding> =
        split.train_pair_ids.iter().map(|id| embedding(inputs, id)).collect::<Result<_>>()?;
    let test_emb: Vec<&DatasetEmbedding> =
        split.test_pair_ids.iter().map(|id| embedding(inputs, id)).collect::<Result<_>>()?;
    let train_map: BTreeMap<String, DatasetEmbedding> =
        split.train_pair_ids.iter().zip(&train_emb).map(|(id, e)| (id.clone(), (*e).clone())).collect();
    let model_ids = inputs.p.model_ids();
    let rows: Vec<&[f64]> = split.test_pair_ids.iter().map(|id| inputs.p.row_for(id)).collect::<Result<_>>()?;

    let records = |picks: Vec<String>| -> Result<Vec<SelectionRecord>> {
        split
            .test_pair_ids
            .iter()
            .zip(picks)
            .zip(&rows)
            .map(|((id, sel), row)| {
                Ok(SelectionRecord { pair_id: id.clone(), true_rank: true_rank(row, model_ids, &sel)?, selected: sel })
            })
            .collect()
    };
    let mut results = Vec::new();
    let mut push = |method: &str, picks: Vec<String>| -> Result<()> {
        results.push(SelectionResult { method: method.to_string(), records: records(picks)? });
        Ok(())
    };

    let f = train_meta_predictor(
        &train_map,
        &p_train,
        inputs.registry,
        &config.gbt,
        config.target_transform,
        inputs.descriptors,
        exec,
    )?;
    push("M3OOD", test_emb.iter().map(|e| f.select_model(e, inputs.registry)).collect::<Result<_>>()?)?;

    let gb = global_best(&p_train);
    push("GB", vec![gb; test_emb.len()])?;

    let mut random = RandomSelector::new(config.random_seed);
    push("Random", test_emb.iter().map(|_| random.select(inputs.registry)).collect())?;

    let isac = isac_fit(&train_emb, &p_train, config.isac_k.map(|k| k.min(train_emb.len())), config.isac_seed)?;
    push("ISAC", test_emb.iter().map(|e| isac.select(e)).collect::<Result<_>>()?)?;

    push("AS", test_emb.iter().map(|e| as_select(&train_emb, &p_train, e)).collect::<Result<_>>()?)?;

    let alors = alors_fit(&train_emb, &p_train, config.alors_rank, config.alors_neighbors)?;
    push("ALORS", test_emb.iter().map(|e| alors.select(e)).collect::<Result<_>>()?)?;

    for d in &config.fixed_detectors {
        inputs.registry.index_of(d)?;
        push(d, vec![d.clone(); test_emb.len()])?;
    }

    let mut skipped = Vec::new();
    if let Some(llm) = inputs.llm {
        match split.test_pair_ids.iter().map(|id| llm(id)).collect::<Result<Vec<_>>>() {
            Ok(picks) => push("LLM", picks)?,
            Err(e) => skipped.push(("LLM".to_string(), e.to_string())),
        }
    }

    if let Some(source) = &inputs.ensemble {
        let aurocs = exec.try_map_range(split.test_pair_ids.len(), |i| {
            ensemble_auroc(source, &split.test_pair_ids[i], inputs.registry)
        })?;
        let recs = split
            .test_pair_ids
            .iter()
            .zip(&aurocs)
            .zip(&rows)
            .map(|((id, &a), row)| SelectionRecord {
                pair_id: id.clone(),
                selected: "ensemble".into(),
                true_rank: value_rank(row, a),
            })
            .collect();
        results.push(SelectionResult { method: "ME".into(), records: recs });
    }

    let oracle = rows.iter().map(|row| model_ids[argmax(row).expect("nonempty row")].clone()).collect();
    results.push(SelectionResult { method: ORACLE.to_string(), records: records(oracle)? });
    Ok(Evaluation { results, skipped })
}
