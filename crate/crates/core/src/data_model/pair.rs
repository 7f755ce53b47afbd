//! Dataset-pair manifests, benchmark indexes, and meta-train/test splits.
//!
//! Paths inside a manifest are relative to the manifest's own directory.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::access;
use super::export::{read_feature_export, ExportRole, FeatureExport};
use super::perf::PerformanceMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Video,
    Flow,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClipLists {
    #[serde(default)]
    pub train: Vec<PathBuf>,
    #[serde(default)]
    pub test: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetPair {
    pub pair_id: String,
    #[serde(default)]
    pub description: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub modalities: BTreeMap<Modality, ClipLists>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub exports: BTreeMap<ExportRole, PathBuf>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub deep_embeddings: BTreeMap<Modality, PathBuf>,
    /// Directory that relative paths resolve against. Not serialized.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl DatasetPair {
    pub fn new(pair_id: impl Into<String>) -> Self {
        Self {
            pair_id: pair_id.into(),
            description: String::new(),
            modalities: BTreeMap::new(),
            exports: BTreeMap::new(),
            deep_embeddings: BTreeMap::new(),
            base_dir: PathBuf::new(),
        }
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Resolved train clip paths for a modality (empty when absent).
    pub fn train_clips(&self, modality: Modality) -> Vec<PathBuf> {
        self.modalities.get(&modality).map(|l| l.train.iter().map(|p| self.resolve(p)).collect()).unwrap_or_default()
    }

    pub fn export_path(&self, role: ExportRole) -> Option<PathBuf> {
        self.exports.get(&role).map(|p| self.resolve(p))
    }

    pub fn deep_embedding_path(&self, modality: Modality) -> Option<PathBuf> {
        self.deep_embeddings.get(&modality).map(|p| self.resolve(p))
    }

    pub fn load_export(&self, role: ExportRole) -> Result<FeatureExport> {
        let path = self
            .export_path(role)
            .ok_or_else(|| Error::invalid(format!("pair {} has no {role:?} export", self.pair_id)))?;
        read_feature_export(&path, Some(role))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

pub fn read_pair_manifest(path: &Path) -> Result<DatasetPair> {
    let text = access::read_string(path)?;
    let mut pair: DatasetPair = serde_json::from_str(&text).map_err(|e| Error::json(path.display().to_string(), e))?;
    pair.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(pair)
}

pub fn write_pair_manifest(pair: &DatasetPair, path: &Path) -> Result<()> {
    access::write_bytes(path, pair.to_json().as_bytes())
}

/// Structural check of a pair. Returns human-readable violations; empty
/// means valid. Reads the train export's labels when one is declared.
pub fn validate_pair(pair: &DatasetPair) -> Vec<String> {
    let mut out = Vec::new();
    if pair.pair_id.trim().is_empty() {
        out.push("empty pair_id".to_string());
    }
    let has_media = pair.modalities.values().any(|l| !l.train.is_empty() || !l.test.is_empty());
    if !has_media && pair.exports.is_empty() {
        out.push("no data source".to_string());
    }
    if let (Some(v), Some(f)) = (pair.modalities.get(&Modality::Video), pair.modalities.get(&Modality::Flow)) {
        if v.train.len() != f.train.len() {
            out.push(format!("video and flow train clip counts differ ({} vs {})", v.train.len(), f.train.len()));
        }
    }
    if let Some(path) = pair.export_path(ExportRole::Train) {
        match read_feature_export(&path, None) {
            Ok(export) => {
                if export.ood_labels.is_some() {
                    out.push("train side must be ID-only".to_string());
                }
                if export.class_labels.is_none() {
                    out.push("train export lacks class labels".to_string());
                }
            }
            Err(e) => out.push(format!("train export unreadable: {e}")),
        }
    }
    out
}

/// Violations across a collection: per-pair problems plus duplicate ids.
pub fn validate_collection(pairs: &[DatasetPair]) -> Vec<String> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for p in pairs {
        if !seen.insert(p.pair_id.as_str()) {
            out.push(format!("duplicate pair_id {}", p.pair_id));
        }
        out.extend(validate_pair(p).into_iter().map(|v| format!("{}: {v}", p.pair_id)));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSpec {
    pub train_pair_ids: Vec<String>,
    pub test_pair_ids: Vec<String>,
}

impl SplitSpec {
    pub fn validate(&self, p: &PerformanceMatrix) -> Result<()> {
        if self.train_pair_ids.is_empty() || self.test_pair_ids.is_empty() {
            return Err(Error::invalid("split needs nonempty train and test sides"));
        }
        let train: BTreeSet<&String> = self.train_pair_ids.iter().collect();
        if let Some(shared) = self.test_pair_ids.iter().find(|t| train.contains(t)) {
            return Err(Error::invalid(format!("pair {shared} is on both sides of the split")));
        }
        for id in self.train_pair_ids.iter().chain(&self.test_pair_ids) {
            p.pair_index(id)?;
        }
        Ok(())
    }
}

pub fn read_split(path: &Path) -> Result<SplitSpec> {
    let text = access::read_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::json(path.display().to_string(), e))
}

/// `benchmark.json`: the manifest list and oracle matrix of a generated tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkIndex {
    pub pairs: Vec<PathBuf>,
    pub oracle: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regimes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl BenchmarkIndex {
    /// Loads every listed pair manifest, resolving against `index`'s directory.
    pub fn load_pairs(&self, index: &Path) -> Result<Vec<DatasetPair>> {
        let base = index.parent().unwrap_or(Path::new(""));
        self.pairs.iter().map(|p| read_pair_manifest(&base.join(p))).collect()
    }

    pub fn oracle_path(&self, index: &Path) -> PathBuf {
        index.parent().unwrap_or(Path::new("")).join(&self.oracle)
    }
}

pub fn read_benchmark_index(path: &Path) -> Result<BenchmarkIndex> {
    let text = access::read_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::json(path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_model::export::write_feature_export;
    use nalgebra::DMatrix;

    fn train_export(with_ood: bool) -> FeatureExport {
        FeatureExport::new(
            DMatrix::from_row_slice(2, 2, &[1., 0., 0., 1.]),
            DMatrix::from_row_slice(2, 2, &[2., 0., 0., 2.]),
            None,
            Some(vec![0, 1]),
            with_ood.then(|| vec![false, true]),
        )
        .unwrap()
    }

    #[test]
    fn well_formed_pair() {
        let d = tempfile::tempdir().unwrap();
        write_feature_export(&train_export(false), &d.path().join("train")).unwrap();
        let mut p = DatasetPair::new("a");
        p.base_dir = d.path().to_path_buf();
        p.exports.insert(ExportRole::Train, "train".into());
        assert!(validate_pair(&p).is_empty(), "{:?}", validate_pair(&p));
    }

    #[test]
    fn no_data_source() {
        assert_eq!(validate_pair(&DatasetPair::new("a")), vec!["no data source"]);
    }

    #[test]
    fn train_with_ood_labels() {
        let d = tempfile::tempdir().unwrap();
        write_feature_export(&train_export(true), &d.path().join("train")).unwrap();
        let mut p = DatasetPair::new("a");
        p.base_dir = d.path().to_path_buf();
        p.exports.insert(ExportRole::Train, "train".into());
        assert_eq!(validate_pair(&p), vec!["train side must be ID-only"]);
    }

    #[test]
    fn manifest_round_trip() {
        let d = tempfile::tempdir().unwrap();
        let mut p = DatasetPair::new("near_hmdb51");
        p.description = "HMDB51 25/26 split".into();
        p.modalities.insert(Modality::Video, ClipLists { train: vec!["clips/a.m3vd".into()], test: vec![] });
        p.deep_embeddings.insert(Modality::Flow, "emb/flow.emb".into());
        let path = d.path().join("pair.json");
        write_pair_manifest(&p, &path).unwrap();
        let back = read_pair_manifest(&path).unwrap();
        assert_eq!(back.base_dir, d.path());
        assert_eq!(back.to_json(), p.to_json());
        assert_eq!(back.train_clips(Modality::Video), vec![d.path().join("clips/a.m3vd")]);
        assert!(serde_json::from_str::<DatasetPair>("{\"pair_id\":\"x\",\"bogus\":1}").is_err());
    }

    #[test]
    fn duplicate_ids_in_collection() {
        let mut a = DatasetPair::new("x");
        a.exports.insert(ExportRole::Test, "nowhere".into());
        let v = validate_collection(&[a.clone(), a]);
        assert!(v.iter().any(|s| s.contains("duplicate pair_id x")));
    }

    #[test]
    fn split_checks() {
        let p = PerformanceMatrix::new(vec!["a".into(), "b".into()], vec!["MSP".into()], vec![vec![0.5], vec![0.6]])
            .unwrap();
        let ok = SplitSpec { train_pair_ids: vec!["a".into()], test_pair_ids: vec!["b".into()] };
        assert!(ok.validate(&p).is_ok());
        let overlap = SplitSpec { train_pair_ids: vec!["a".into()], test_pair_ids: vec!["a".into()] };
        assert!(overlap.validate(&p).is_err());
        let missing = SplitSpec { train_pair_ids: vec!["a".into()], test_pair_ids: vec!["zz".into()] };
        assert!(missing.validate(&p).is_err());
    }
}
