//! Per-dataset feature exports: the substrate every detector scores.
//!
//! On disk an export is a directory:
//!
//! * `features.csv` – `N` rows of `D` penultimate features
//! * `logits.csv` – `N` rows of `C` logits
//! * `head_w.csv`, `head_b.csv` – optional linear head (`C×D` and one row of `C`)
//! * `labels.csv` – header `class_label,ood_label`; blank where inapplicable
//!
//! Numeric files have no header and use shortest round-trip decimals.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::access;
use super::csv_util::{format_row, read_numeric_rows};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportRole {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearHead {
    /// `C×D`
    pub weight: DMatrix<f64>,
    /// length `C`
    pub bias: DVector<f64>,
}

impl LinearHead {
    pub fn logits(&self, z: &DVector<f64>) -> DVector<f64> {
        &self.weight * z + &self.bias
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureExport {
    pub features: DMatrix<f64>,
    pub logits: DMatrix<f64>,
    pub head: Option<LinearHead>,
    pub class_labels: Option<Vec<usize>>,
    /// `true` marks an OOD sample.
    pub ood_labels: Option<Vec<bool>>,
}

impl FeatureExport {
    pub fn new(
        features: DMatrix<f64>,
        logits: DMatrix<f64>,
        head: Option<LinearHead>,
        class_labels: Option<Vec<usize>>,
        ood_labels: Option<Vec<bool>>,
    ) -> Result<Self> {
        let export = Self { features, logits, head, class_labels, ood_labels };
        export.validate()?;
        Ok(export)
    }

    pub fn n_samples(&self) -> usize {
        self.features.nrows()
    }
    pub fn feature_dim(&self) -> usize {
        self.features.ncols()
    }
    pub fn n_classes(&self) -> usize {
        self.logits.ncols()
    }

    pub fn feature_row(&self, i: usize) -> DVector<f64> {
        self.features.row(i).transpose()
    }

    pub fn logit_row(&self, i: usize) -> Vec<f64> {
        self.logits.row(i).iter().copied().collect()
    }

    fn validate(&self) -> Result<()> {
        let n = self.features.nrows();
        let d = self.features.ncols();
        let c = self.logits.ncols();
        if n < 1 || d < 1 {
            return Err(Error::InconsistentExport("export needs N ≥ 1 and D ≥ 1".into()));
        }
        if c < 2 {
            return Err(Error::InconsistentExport("export needs at least 2 classes".into()));
        }
        if self.logits.nrows() != n {
            return Err(Error::InconsistentExport(format!(
                "features have {n} rows but logits have {}",
                self.logits.nrows()
            )));
        }
        if self.features.iter().chain(self.logits.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InconsistentExport("non-finite feature or logit".into()));
        }
        if let Some(head) = &self.head {
            if head.weight.shape() != (c, d) || head.bias.len() != c {
                return Err(Error::InconsistentExport(format!(
                    "head is {}x{} + {}, expected {c}x{d} + {c}",
                    head.weight.nrows(),
                    head.weight.ncols(),
                    head.bias.len()
                )));
            }
            if head.weight.iter().chain(head.bias.iter()).any(|v| !v.is_finite()) {
                return Err(Error::InconsistentExport("non-finite head parameter".into()));
            }
        }
        if let Some(labels) = &self.class_labels {
            if labels.len() != n {
                return Err(Error::InconsistentExport(format!("{} class labels for {n} samples", labels.len())));
            }
            if let Some(bad) = labels.iter().find(|&&l| l >= c) {
                return Err(Error::InconsistentExport(format!("class label {bad} ≥ C={c}")));
            }
        }
        if let Some(labels) = &self.ood_labels {
            if labels.len() != n {
                return Err(Error::InconsistentExport(format!("{} ood labels for {n} samples", labels.len())));
            }
        }
        Ok(())
    }

    /// Checks the label requirements of a role: train exports need class
    /// labels, test exports need both ID and OOD samples.
    pub fn check_role(&self, role: ExportRole) -> Result<()> {
        match role {
            ExportRole::Train => {
                if self.class_labels.is_none() {
                    return Err(Error::MissingLabels("train export needs class_label".into()));
                }
            }
            ExportRole::Test => {
                let labels = self
                    .ood_labels
                    .as_ref()
                    .ok_or_else(|| Error::MissingLabels("test export needs ood_label".into()))?;
                let n_ood = labels.iter().filter(|&&x| x).count();
                if n_ood == 0 || n_ood == labels.len() {
                    return Err(Error::DegenerateTestLabels(format!("{} ID / {n_ood} OOD", labels.len() - n_ood)));
                }
            }
        }
        Ok(())
    }
}

fn to_matrix(rows: Vec<Vec<f64>>, what: &str) -> Result<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(Error::InconsistentExport(format!("{what} is empty")));
    }
    Ok(DMatrix::from_row_iterator(nrows, ncols, rows.into_iter().flatten()))
}

type Labels = (Option<Vec<usize>>, Option<Vec<bool>>);

fn read_labels(path: &Path) -> Result<Labels> {
    let file = access::open(path)?;
    let ctx = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(file);
    let headers = reader.headers().map_err(|e| Error::csv(&ctx, e))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (class_col, ood_col) = (col("class_label"), col("ood_label"));
    if class_col.is_none() && ood_col.is_none() {
        return Err(Error::CorruptFile(format!("{ctx}: expected class_label and/or ood_label columns")));
    }
    let mut class = Vec::new();
    let mut ood = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv(&ctx, e))?;
        let field = |c: Option<usize>| c.and_then(|i| record.get(i)).unwrap_or("").to_string();
        let cls = field(class_col);
        class.push(if cls.is_empty() {
            None
        } else {
            Some(cls.parse::<usize>().map_err(|_| Error::CorruptFile(format!("{ctx}: bad class_label {cls:?}")))?)
        });
        let o = field(ood_col);
        ood.push(match o.as_str() {
            "" => None,
            "0" => Some(false),
            "1" => Some(true),
            other => return Err(Error::CorruptFile(format!("{ctx}: bad ood_label {other:?}"))),
        });
    }
    Ok((collapse(class, "class_label")?, collapse(ood, "ood_label")?))
}

/// All blank → `None`; all present → `Some`; partial → error.
fn collapse<T>(values: Vec<Option<T>>, name: &str) -> Result<Option<Vec<T>>> {
    let present = values.iter().filter(|v| v.is_some()).count();
    if present == 0 {
        Ok(None)
    } else if present == values.len() {
        Ok(Some(values.into_iter().flatten().collect()))
    } else {
        Err(Error::InconsistentExport(format!("{name} present on {present} of {} rows", values.len())))
    }
}

/// Reads an export directory. When `role` is given its label requirements
/// are enforced as well.
pub fn read_feature_export(dir: &Path, role: Option<ExportRole>) -> Result<FeatureExport> {
    let features = to_matrix(read_numeric_rows(&dir.join("features.csv"))?, "features")?;
    let logits = to_matrix(read_numeric_rows(&dir.join("logits.csv"))?, "logits")?;
    let w_path = dir.join("head_w.csv");
    let b_path = dir.join("head_b.csv");
    let head = match (w_path.exists(), b_path.exists()) {
        (true, true) => {
            let weight = to_matrix(read_numeric_rows(&w_path)?, "head_w")?;
            let b_rows = read_numeric_rows(&b_path)?;
            let bias: Vec<f64> = b_rows.into_iter().flatten().collect();
            Some(LinearHead { weight, bias: DVector::from_vec(bias) })
        }
        (false, false) => None,
        _ => {
            return Err(Error::InconsistentExport(
                "head_w.csv and head_b.csv must both be present or both absent".into(),
            ))
        }
    };
    let labels_path = dir.join("labels.csv");
    let (class_labels, ood_labels) = if labels_path.exists() { read_labels(&labels_path)? } else { (None, None) };
    let export = FeatureExport::new(features, logits, head, class_labels, ood_labels)?;
    if let Some(role) = role {
        export.check_role(role)?;
    }
    Ok(export)
}

fn matrix_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        out.push_str(&format_row(m.row(r).iter().copied()));
        out.push('\n');
    }
    out
}

pub fn write_feature_export(export: &FeatureExport, dir: &Path) -> Result<()> {
    access::write_bytes(&dir.join("features.csv"), matrix_csv(&export.features).as_bytes())?;
    access::write_bytes(&dir.join("logits.csv"), matrix_csv(&export.logits).as_bytes())?;
    if let Some(head) = &export.head {
        access::write_bytes(&dir.join("head_w.csv"), matrix_csv(&head.weight).as_bytes())?;
        let mut b = format_row(head.bias.iter().copied());
        b.push('\n');
        access::write_bytes(&dir.join("head_b.csv"), b.as_bytes())?;
    }
    let mut labels = String::from("class_label,ood_label\n");
    for i in 0..export.n_samples() {
        let c = export.class_labels.as_ref().map(|l| l[i].to_string()).unwrap_or_default();
        let o = export.ood_labels.as_ref().map(|l| if l[i] { "1" } else { "0" }).unwrap_or("");
        let _ = writeln!(labels, "{c},{o}");
    }
    access::write_bytes(&dir.join("labels.csv"), labels.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, body: &str) {
        std::fs::write(dir.join(name), body).unwrap();
    }

    #[test]
    fn three_sample_test_export() {
        let d = tempfile::tempdir().unwrap();
        write(d.path(), "features.csv", "1,2\n3,4\n5,6\n");
        write(d.path(), "logits.csv", "0.1,0.9\n0.8,0.2\n0.5,0.5\n");
        write(d.path(), "labels.csv", "class_label,ood_label\n,0\n,0\n,1\n");
        let e = read_feature_export(d.path(), Some(ExportRole::Test)).unwrap();
        assert_eq!(e.n_samples(), 3);
        assert_eq!(e.feature_dim(), 2);
        assert_eq!(e.ood_labels, Some(vec![false, false, true]));
        assert!(e.class_labels.is_none());
    }

    #[test]
    fn row_mismatch() {
        let d = tempfile::tempdir().unwrap();
        write(d.path(), "features.csv", "1,2\n3,4\n5,6\n7,8\n");
        write(d.path(), "logits.csv", "0.1,0.9\n0.8,0.2\n0.5,0.5\n");
        let err = read_feature_export(d.path(), None).unwrap_err();
        assert!(err.to_string().starts_with("inconsistent export"), "{err}");
    }

    #[test]
    fn degenerate_and_missing_labels() {
        let d = tempfile::tempdir().unwrap();
        write(d.path(), "features.csv", "1,2\n3,4\n");
        write(d.path(), "logits.csv", "0.1,0.9\n0.8,0.2\n");
        write(d.path(), "labels.csv", "class_label,ood_label\n,0\n,0\n");
        let err = read_feature_export(d.path(), Some(ExportRole::Test)).unwrap_err();
        assert!(matches!(err, Error::DegenerateTestLabels(_)));
        assert!(err.to_string().contains("degenerate test labels"));

        let err = read_feature_export(d.path(), Some(ExportRole::Train)).unwrap_err();
        assert!(matches!(err, Error::MissingLabels(_)));

        std::fs::remove_file(d.path().join("labels.csv")).unwrap();
        let err = read_feature_export(d.path(), Some(ExportRole::Test)).unwrap_err();
        assert!(matches!(err, Error::MissingLabels(_)));
    }

    #[test]
    fn head_shape_checked() {
        let f = DMatrix::from_row_slice(2, 3, &[1., 2., 3., 4., 5., 6.]);
        let l = DMatrix::from_row_slice(2, 2, &[0., 1., 1., 0.]);
        let bad = LinearHead { weight: DMatrix::zeros(2, 2), bias: DVector::zeros(2) };
        assert!(FeatureExport::new(f.clone(), l.clone(), Some(bad), None, None).is_err());
        let good = LinearHead { weight: DMatrix::zeros(2, 3), bias: DVector::zeros(2) };
        assert!(FeatureExport::new(f, l, Some(good), Some(vec![0, 2]), None).is_err());
    }

    #[test]
    fn write_read_write_is_byte_stable() {
        let f = DMatrix::from_row_slice(3, 2, &[0.1, 1.0 / 3.0, -2.5e-7, 4.0, 5.5, 6.25]);
        let l = DMatrix::from_row_slice(3, 2, &[0.1, 0.9, 0.8, -0.2, 1e10, 0.5]);
        let head = LinearHead {
            weight: DMatrix::from_row_slice(2, 2, &[1.0, -1.0, 0.5, 0.25]),
            bias: DVector::from_vec(vec![0.0, 0.125]),
        };
        let e = FeatureExport::new(f, l, Some(head), Some(vec![0, 1, 1]), Some(vec![false, true, false])).unwrap();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        write_feature_export(&e, a.path()).unwrap();
        let back = read_feature_export(a.path(), None).unwrap();
        assert_eq!(back, e);
        write_feature_export(&back, b.path()).unwrap();
        for name in ["features.csv", "logits.csv", "head_w.csv", "head_b.csv", "labels.csv"] {
            assert_eq!(
                std::fs::read(a.path().join(name)).unwrap(),
                std::fs::read(b.path().join(name)).unwrap(),
                "{name}"
            );
        }
    }
}
