//! Running every registered detector over dataset pairs.

use std::path::Path;

use super::{auroc, fit_and_score, DetectorParams};
use crate::data_model::{access, DatasetPair, ExportRole, FeatureExport, PerformanceMatrix};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::registry::{DetectorId, Registry};

/// Test-set scores of every registry detector on one pair, registry order.
#[derive(Debug, Clone, PartialEq)]
pub struct PairScores {
    pub pair_id: String,
    pub scores: Vec<(DetectorId, Vec<f64>)>,
}

fn wrap(pair_id: &str, id: DetectorId, e: Error) -> Error {
    Error::Detector { pair_id: pair_id.to_string(), detector: id.as_str().to_string(), source: Box::new(e) }
}

fn load_pair(pair: &DatasetPair) -> Result<(FeatureExport, FeatureExport)> {
    Ok((pair.load_export(ExportRole::Train)?, pair.load_export(ExportRole::Test)?))
}

pub fn score_pair(pair: &DatasetPair, registry: &Registry, params: &DetectorParams) -> Result<PairScores> {
    let ids = registry.detector_ids()?;
    let (train, test) = load_pair(pair)?;
    let scores = ids
        .iter()
        .map(|&id| fit_and_score(id, &train, &test, params).map(|s| (id, s)).map_err(|e| wrap(&pair.pair_id, id, e)))
        .collect::<Result<_>>()?;
    Ok(PairScores { pair_id: pair.pair_id.clone(), scores })
}

/// AUROC of every registry detector on every pair; cells are computed under
/// `exec` and written in (pair, registry) order.
pub fn build_performance_matrix(
    pairs: &[DatasetPair],
    registry: &Registry,
    params: &DetectorParams,
    exec: Exec,
) -> Result<PerformanceMatrix> {
    let ids = registry.detector_ids()?;
    let exports = exec.try_map_range(pairs.len(), |i| load_pair(&pairs[i]))?;
    let m = ids.len();
    let cells = exec.try_map_range(pairs.len() * m, |cell| {
        let (i, j) = (cell / m, cell % m);
        let (train, test) = &exports[i];
        let labels = test.ood_labels.as_ref().ok_or_else(|| Error::MissingLabels("test export needs ood_label".into()));
        labels
            .and_then(|l| auroc(&fit_and_score(ids[j], train, test, params)?, l))
            .map_err(|e| wrap(&pairs[i].pair_id, ids[j], e))
    })?;
    let values = cells.chunks(m).map(|r| r.to_vec()).collect();
    PerformanceMatrix::new(pairs.iter().map(|p| p.pair_id.clone()).collect(), registry.ids().to_vec(), values)
}

/// Writes `dir/<pair_id>/<detector>.csv`, one score per line.
pub fn write_score_files(scores: &PairScores, dir: &Path) -> Result<()> {
    for (id, s) in &scores.scores {
        let mut text = String::with_capacity(s.len() * 20);
        for v in s {
            text.push_str(&format!("{v}\n"));
        }
        let path = dir.join(&scores.pair_id).join(format!("{}.csv", id.as_str()));
        access::write_bytes(&path, text.as_bytes())?;
    }
    Ok(())
}

pub fn read_score_file(path: &Path) -> Result<Vec<f64>> {
    access::read_string(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::CorruptFile(format!("{}: bad score {l:?}", path.display())))
        })
        .collect()
}
