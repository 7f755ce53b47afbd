use std::path::{Path, PathBuf};

use oodselect_core::benchgen::synth_feature_export;
use oodselect_core::data_model::{
    read_performance_matrix, write_feature_export, write_performance_matrix, DatasetPair, ExportRole, FeatureExport,
};
use oodselect_core::detectors::{
    auroc, build_performance_matrix, fit_and_score, read_score_file, score_pair, write_score_files, DetectorParams,
};
use oodselect_core::exec::Exec;
use oodselect_core::registry::Registry;
use oodselect_core::Error;

fn write_pair(dir: &Path, id: &str, train: &FeatureExport, test: &FeatureExport) -> DatasetPair {
    let mut pair = DatasetPair::new(id);
    pair.base_dir = dir.join(id);
    for (role, export, rel) in [(ExportRole::Train, train, "train"), (ExportRole::Test, test, "test")] {
        write_feature_export(export, &pair.base_dir.join(rel)).unwrap();
        pair.exports.insert(role, PathBuf::from(rel));
    }
    pair
}

#[test]
fn large_shift_is_easy_for_every_detector() {
    let dir = tempfile::tempdir().unwrap();
    // Class dims dominate: with mostly-nuisance dims the train 90th percentile lands at noise
    // level and ReAct clips away the class signal. ViM still needs a residual subspace.
    let (train, test) = synth_feature_export(200, 200, 6, 8, 0.1, 10.0, 5).unwrap();
    let pair = write_pair(dir.path(), "easy", &train, &test);
    let p =
        build_performance_matrix(&[pair], &Registry::detectors(), &DetectorParams::default(), Exec::Parallel).unwrap();
    for (id, v) in p.model_ids().iter().zip(p.row(0)) {
        assert!(*v > 0.9, "{id}: {v}");
    }
    write_performance_matrix(&p, &dir.path().join("P.csv")).unwrap();
    assert_eq!(read_performance_matrix(&dir.path().join("P.csv")).unwrap(), p);
}

#[test]
fn auroc_trend_is_monotone_in_shift() {
    let reg = Registry::detectors();
    let params = DetectorParams { knn_k: 10, ..DetectorParams::default() };
    let shifts = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0];
    for id in reg.detector_ids().unwrap() {
        let means: Vec<f64> = shifts
            .iter()
            .map(|&shift| {
                (0..20u64)
                    .map(|seed| {
                        let (train, test) = synth_feature_export(60, 60, 4, 12, 0.3, shift, seed).unwrap();
                        let s = fit_and_score(id, &train, &test, &params).unwrap();
                        auroc(&s, test.ood_labels.as_ref().unwrap()).unwrap()
                    })
                    .sum::<f64>()
                    / 20.0
            })
            .collect();
        assert!(means.windows(2).all(|w| w[1] >= w[0]), "{}: {means:?}", id.as_str());
    }
}

#[test]
fn failures_name_pair_and_detector() {
    let dir = tempfile::tempdir().unwrap();
    let (mut train, mut test) = synth_feature_export(20, 20, 3, 6, 0.2, 2.0, 1).unwrap();
    train.head = None;
    test.head = None;
    let pair = write_pair(dir.path(), "headless", &train, &test);
    let err = build_performance_matrix(&[pair], &Registry::detectors(), &DetectorParams::default(), Exec::Sequential)
        .unwrap_err();
    match err {
        Error::Detector { pair_id, detector, source } => {
            assert_eq!(pair_id, "headless");
            assert_eq!(detector, "ReAct");
            assert!(matches!(*source, Error::ReactMissingHead));
        }
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn score_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = synth_feature_export(30, 30, 3, 8, 0.2, 1.0, 4).unwrap();
    let pair = write_pair(dir.path(), "s", &train, &test);
    let scores = score_pair(&pair, &Registry::detectors(), &DetectorParams::default()).unwrap();
    let out = dir.path().join("scores");
    write_score_files(&scores, &out).unwrap();
    for (id, s) in &scores.scores {
        let back = read_score_file(&out.join("s").join(format!("{}.csv", id.as_str()))).unwrap();
        assert_eq!(&back, s);
    }
}
