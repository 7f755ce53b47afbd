//! The nine post-hoc detectors, AUROC, and performance-matrix construction.
//!
//! Every score is oriented so that higher means more in-distribution.

pub mod activation;
pub mod auroc;
pub mod knn;
pub mod logits;
pub mod mahalanobis;
pub mod vim;
pub mod zoo;

use serde::{Deserialize, Serialize};

use crate::data_model::{FeatureExport, LinearHead};
use crate::error::{Error, Result};
use crate::registry::DetectorId;

pub use activation::{ash_prune, ash_score, react_score};
pub use auroc::{auroc, average_ranks, classify, Decision};
pub use knn::KnnModel;
pub use logits::{energy_score, gen_score, logsumexp, maxlogit_score, msp_score};
pub use mahalanobis::MahalanobisModel;
pub use vim::VimModel;
pub use zoo::{build_performance_matrix, read_score_file, score_pair, write_score_files, PairScores};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorParams {
    pub energy_temperature: f64,
    pub gen_gamma: f64,
    pub gen_top_m: usize,
    pub knn_k: usize,
    /// ViM subspace dimension; `None` means `max(1, ⌊D/2⌋)`.
    pub vim_dim: Option<usize>,
    pub react_percentile: f64,
    /// Fixed ReAct clip value overriding the train percentile.
    pub react_clip: Option<f64>,
    pub ash_percentile: f64,
    /// ASH-S rescaling of the surviving activations.
    pub ash_scale: bool,
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self {
            energy_temperature: 1.0,
            gen_gamma: 0.1,
            gen_top_m: 100,
            knn_k: 50,
            vim_dim: None,
            react_percentile: 90.0,
            react_clip: None,
            ash_percentile: 90.0,
            ash_scale: false,
        }
    }
}

/// A detector fitted on one train export.
#[derive(Debug, Clone)]
pub enum ScorerModel {
    Msp,
    Gen { gamma: f64, top_m: usize },
    MaxLogit,
    Energy { temperature: f64 },
    Mahalanobis(MahalanobisModel),
    Vim(VimModel),
    Knn(KnnModel),
    React { head: LinearHead, clip: f64 },
    Ash { head: LinearHead, percentile: f64, scale: bool },
}

fn head_of(export: &FeatureExport, id: DetectorId) -> Result<LinearHead> {
    export.head.clone().ok_or(match id {
        DetectorId::React => Error::ReactMissingHead,
        _ => Error::AshMissingHead,
    })
}

impl ScorerModel {
    pub fn fit(id: DetectorId, train: &FeatureExport, params: &DetectorParams) -> Result<Self> {
        Ok(match id {
            DetectorId::Msp => ScorerModel::Msp,
            DetectorId::Gen => {
                if !(params.gen_gamma > 0.0 && params.gen_gamma < 1.0) {
                    return Err(Error::invalid(format!("GEN gamma must be in (0, 1), got {}", params.gen_gamma)));
                }
                ScorerModel::Gen { gamma: params.gen_gamma, top_m: params.gen_top_m }
            }
            DetectorId::MaxLogit => ScorerModel::MaxLogit,
            DetectorId::EnergyBased => {
                if params.energy_temperature.is_nan() || params.energy_temperature <= 0.0 {
                    return Err(Error::invalid("energy temperature must be positive"));
                }
                ScorerModel::Energy { temperature: params.energy_temperature }
            }
            DetectorId::Mahalanobis => ScorerModel::Mahalanobis(MahalanobisModel::fit(train)?),
            DetectorId::Vim => ScorerModel::Vim(VimModel::fit(train, params.vim_dim)?),
            DetectorId::Knn => ScorerModel::Knn(KnnModel::fit(train, params.knn_k.min(train.n_samples()))?),
            DetectorId::React => {
                let head = head_of(train, id)?;
                let clip = params
                    .react_clip
                    .unwrap_or_else(|| activation::activation_percentile(&train.features, params.react_percentile));
                ScorerModel::React { head, clip }
            }
            DetectorId::Ash => ScorerModel::Ash {
                head: head_of(train, id)?,
                percentile: params.ash_percentile,
                scale: params.ash_scale,
            },
        })
    }

    /// One score per sample of `export`.
    pub fn score(&self, export: &FeatureExport) -> Result<Vec<f64>> {
        let n = export.n_samples();
        let per_row = |f: &dyn Fn(usize) -> Result<f64>| (0..n).map(f).collect::<Result<Vec<_>>>();
        let scores = match self {
            ScorerModel::Msp => per_row(&|i| msp_score(&export.logit_row(i)))?,
            ScorerModel::Gen { gamma, top_m } => per_row(&|i| gen_score(&export.logit_row(i), *gamma, *top_m))?,
            ScorerModel::MaxLogit => per_row(&|i| maxlogit_score(&export.logit_row(i)))?,
            ScorerModel::Energy { temperature } => per_row(&|i| energy_score(&export.logit_row(i), *temperature))?,
            ScorerModel::Mahalanobis(m) => per_row(&|i| Ok(m.score(&export.feature_row(i))))?,
            ScorerModel::Vim(m) => per_row(&|i| Ok(m.score(&export.feature_row(i), &export.logit_row(i))))?,
            ScorerModel::Knn(m) => per_row(&|i| Ok(m.score(export.feature_row(i).as_slice())))?,
            ScorerModel::React { head, clip } => {
                check_head(head, export)?;
                react_score(&export.features, head, *clip)
            }
            ScorerModel::Ash { head, percentile, scale } => {
                check_head(head, export)?;
                ash_score(&export.features, head, *percentile, *scale)?
            }
        };
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::Numerical("detector produced a non-finite score".into()));
        }
        Ok(scores)
    }
}

fn check_head(head: &LinearHead, export: &FeatureExport) -> Result<()> {
    if head.weight.ncols() != export.feature_dim() {
        return Err(Error::InconsistentExport(format!(
            "head expects D={}, export has D={}",
            head.weight.ncols(),
            export.feature_dim()
        )));
    }
    Ok(())
}

/// Fits `id` on `train` and scores `test`.
pub fn fit_and_score(
    id: DetectorId,
    train: &FeatureExport,
    test: &FeatureExport,
    params: &DetectorParams,
) -> Result<Vec<f64>> {
    ScorerModel::fit(id, train, params)?.score(test)
}
