//! Deterministic synthetic media, feature exports and whole benchmarks with
//! planted detector regimes.
//!
//! Every random draw goes through [`SplitMix64`]. Pair `i` of a benchmark uses
//! the child seed `splitmix64(seed, i)`, and the artifacts of one pair use
//! further children of that, so pairs can be generated in any order.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data_model::{
    access, write_embedding_file, write_feature_export, write_flow_file, write_pair_manifest, write_video_file,
    BenchmarkIndex, ClipLists, DatasetPair, EmbeddingFile, ExportRole, FeatureExport, FlowClip, LinearHead, Modality,
    PerformanceMatrix, VideoClip,
};
use crate::detectors::{build_performance_matrix, DetectorParams};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::registry::{DetectorId, Registry};
use crate::rng::{splitmix64, SplitMix64};

pub fn synth_video_clip(
    frames: usize,
    height: usize,
    width: usize,
    brightness_mean: f64,
    noise_std: f64,
    seed: u64,
) -> Result<VideoClip> {
    if !(0.0..=255.0).contains(&brightness_mean) || noise_std.is_nan() || noise_std < 0.0 {
        return Err(Error::invalid(format!(
            "brightness {brightness_mean} must be in [0, 255] and noise {noise_std} non-negative"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let n = frames * height * width * 3;
    let data = (0..n)
        .map(|_| {
            let v = if noise_std == 0.0 { brightness_mean } else { rng.normal(brightness_mean, noise_std) };
            v.round().clamp(0.0, 255.0) as u8
        })
        .collect();
    VideoClip::new(frames, height, width, data)
}

/// Flow whose vectors all have length `magnitude` and angle
/// `direction + jitter·N(0,1)`.
pub fn synth_flow_clip(
    frames: usize,
    height: usize,
    width: usize,
    direction: f64,
    magnitude: f64,
    jitter: f64,
    seed: u64,
) -> Result<FlowClip> {
    if !(magnitude.is_finite() && magnitude >= 0.0 && jitter.is_finite() && jitter >= 0.0 && direction.is_finite()) {
        return Err(Error::invalid("flow magnitude and jitter must be non-negative"));
    }
    let mut rng = SplitMix64::new(seed);
    let n = frames * height * width;
    let mut data = Vec::with_capacity(n * 2);
    for _ in 0..n {
        let a = if jitter == 0.0 { direction } else { direction + jitter * rng.next_normal() };
        data.push((magnitude * a.cos()) as f32);
        data.push((magnitude * a.sin()) as f32);
    }
    FlowClip::new(frames, height, width, data)
}

/// How ID and OOD features differ in a generated export.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Archetype {
    /// OOD class part shrunk by `1/(1+shift)` and displaced by `shift` along
    /// a fixed nuisance direction. Logit-based scores separate it.
    Shift,
    /// Strongly anisotropic nuisance dimensions; OOD moves by `shift` along
    /// the two lowest-variance ones. Only a whitened distance notices.
    Covariance,
    /// Each class is two sub-clusters at `±shift` along a class-specific
    /// nuisance axis; OOD sits at the class mean between them. A Gaussian
    /// class model sees OOD as typical, nearest neighbours do not.
    Multimodal,
}

impl Archetype {
    /// The archetype planted for a regime whose best detector is `id`.
    pub fn for_detector(id: DetectorId) -> Result<Self> {
        match id {
            DetectorId::Mahalanobis => Ok(Archetype::Covariance),
            DetectorId::Knn => Ok(Archetype::Multimodal),
            other => Err(Error::invalid(format!(
                "no planted archetype makes {} the unique best detector (supported: Mahalanobis, kNN)",
                other.as_str()
            ))),
        }
    }
}

const HEAD_SCALE: f64 = 8.0;
const HEAD_NOISE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExportShape {
    pub n_train: usize,
    pub n_test_id: usize,
    pub n_ood: usize,
    pub classes: usize,
    pub dim: usize,
}

struct Sampler {
    archetype: Archetype,
    c: usize,
    d: usize,
    spread: f64,
    shift: f64,
    nuisance_sigma: Vec<f64>,
    shift_dir: Vec<f64>,
}

impl Sampler {
    fn new(archetype: Archetype, c: usize, d: usize, spread: f64, shift: f64) -> Self {
        let dn = d - c;
        let mut nuisance_sigma = vec![spread; dn];
        let mut shift_dir = vec![0.0; d];
        match archetype {
            Archetype::Shift => {
                for v in &mut shift_dir[c..] {
                    *v = 1.0 / (dn as f64).sqrt();
                }
            }
            Archetype::Covariance => {
                let tiny = dn.min(2);
                let big = (dn - tiny) / 2;
                for (j, s) in nuisance_sigma.iter_mut().enumerate() {
                    *s = spread
                        * if j >= dn - tiny {
                            0.5
                        } else if j < big {
                            20.0
                        } else {
                            5.0
                        };
                }
                for v in &mut shift_dir[d - tiny..] {
                    *v = 1.0 / (tiny as f64).sqrt();
                }
            }
            Archetype::Multimodal => {}
        }
        Self { archetype, c, d, spread, shift, nuisance_sigma, shift_dir }
    }

    fn id_sample(&self, class: usize, rng: &mut SplitMix64) -> Vec<f64> {
        let mut z = vec![0.0; self.d];
        z[class] = 1.0;
        for (k, v) in z.iter_mut().enumerate() {
            let s = if k < self.c { self.spread } else { self.nuisance_sigma[k - self.c] };
            *v += s * rng.next_normal();
        }
        if self.archetype == Archetype::Multimodal {
            let axis = self.c + class % (self.d - self.c);
            let sign = if rng.next_u64() & 1 == 0 { 1.0 } else { -1.0 };
            z[axis] += sign * self.shift;
        }
        z
    }

    fn ood_sample(&self, rng: &mut SplitMix64) -> Vec<f64> {
        let class = rng.below(self.c);
        match self.archetype {
            Archetype::Shift => {
                let rho = 1.0 / (1.0 + self.shift);
                let mut z = vec![0.0; self.d];
                z[class] = rho;
                for (k, v) in z.iter_mut().enumerate() {
                    *v += self.shift * self.shift_dir[k] + self.spread * rng.next_normal();
                }
                z
            }
            Archetype::Covariance => {
                let mut z = self.id_sample(class, rng);
                for (v, s) in z.iter_mut().zip(&self.shift_dir) {
                    *v += self.shift * s;
                }
                z
            }
            Archetype::Multimodal => {
                let mut z = vec![0.0; self.d];
                z[class] = 1.0;
                for v in z.iter_mut() {
                    *v += self.spread * rng.next_normal();
                }
                z
            }
        }
    }
}

fn seeded_head(c: usize, d: usize, rng: &mut SplitMix64) -> LinearHead {
    let weight = DMatrix::from_fn(c, d, |i, j| {
        let base = if i == j { HEAD_SCALE } else { 0.0 };
        base + HEAD_NOISE * rng.next_normal()
    });
    let bias = DVector::from_fn(c, |_, _| HEAD_NOISE * rng.next_normal());
    LinearHead { weight, bias }
}

fn export_from_rows(
    rows: &[Vec<f64>],
    head: &LinearHead,
    class_labels: Option<Vec<usize>>,
    ood_labels: Option<Vec<bool>>,
) -> Result<FeatureExport> {
    let d = head.weight.ncols();
    let features = DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
    let logits = (&features * head.weight.transpose()).map_with_location(|_, j, v| v + head.bias[j]);
    FeatureExport::new(features, logits, Some(head.clone()), class_labels, ood_labels)
}

/// Train and test exports for one archetype. ID samples cycle through the
/// classes; the test set lists its ID samples first, then the OOD ones.
pub fn synth_archetype_export(
    archetype: Archetype,
    shape: ExportShape,
    id_spread: f64,
    ood_shift: f64,
    seed: u64,
) -> Result<(FeatureExport, FeatureExport)> {
    let ExportShape { n_train, n_test_id, n_ood, classes: c, dim: d } = shape;
    if c < 2 || d < c || n_train < c || n_test_id < 1 || n_ood < 1 {
        return Err(Error::invalid(format!(
            "export shape needs C ≥ 2, D ≥ C, n_train ≥ C and non-empty test sides (got C={c}, D={d}, \
             n_train={n_train}, n_test_id={n_test_id}, n_ood={n_ood})"
        )));
    }
    if archetype != Archetype::Shift && d == c {
        return Err(Error::invalid("this archetype needs at least one nuisance dimension (D > C)"));
    }
    if !(id_spread.is_finite() && id_spread > 0.0 && ood_shift.is_finite() && ood_shift >= 0.0) {
        return Err(Error::invalid("id_spread must be positive and ood_shift non-negative"));
    }
    let sampler = Sampler::new(archetype, c, d, id_spread, ood_shift);
    let head = seeded_head(c, d, &mut SplitMix64::new(splitmix64(seed, 0)));

    let mut rng = SplitMix64::new(splitmix64(seed, 1));
    let train_labels: Vec<usize> = (0..n_train).map(|i| i % c).collect();
    let train_rows: Vec<Vec<f64>> = train_labels.iter().map(|&k| sampler.id_sample(k, &mut rng)).collect();

    let mut rng = SplitMix64::new(splitmix64(seed, 2));
    let mut test_rows: Vec<Vec<f64>> = (0..n_test_id).map(|i| sampler.id_sample(i % c, &mut rng)).collect();
    test_rows.extend((0..n_ood).map(|_| sampler.ood_sample(&mut rng)));
    let ood: Vec<bool> = (0..n_test_id + n_ood).map(|i| i >= n_test_id).collect();

    let train = export_from_rows(&train_rows, &head, Some(train_labels), None)?;
    let test = export_from_rows(&test_rows, &head, None, Some(ood))?;
    Ok((train, test))
}

/// Shift-archetype exports with `n_id` samples on each ID side.
pub fn synth_feature_export(
    n_id: usize,
    n_ood: usize,
    classes: usize,
    dim: usize,
    id_spread: f64,
    ood_shift: f64,
    seed: u64,
) -> Result<(FeatureExport, FeatureExport)> {
    if n_id < classes || n_ood < classes {
        return Err(Error::invalid(format!("need n_id, n_ood ≥ C (got {n_id}, {n_ood}, C={classes})")));
    }
    let shape = ExportShape { n_train: n_id, n_test_id: n_id, n_ood, classes, dim };
    synth_archetype_export(Archetype::Shift, shape, id_spread, ood_shift, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Regime {
    pub best_detector: String,
    /// Offsets of the pair's media parameters:
    /// `[brightness, noise std, flow direction (rad), flow magnitude]`.
    /// Missing trailing entries are zero.
    pub meta_feature_shift: Vec<f64>,
    pub id_cluster_spread: f64,
    pub ood_shift: f64,
}

/// Per-pair artifact sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchSizes {
    pub train_clips: usize,
    pub test_clips: usize,
    pub frames: usize,
    pub height: usize,
    pub width: usize,
    pub n_train: usize,
    pub n_test_id: usize,
    pub n_ood: usize,
    pub classes: usize,
    pub dim: usize,
    pub deep_dim: usize,
}

impl Default for BenchSizes {
    fn default() -> Self {
        Self {
            train_clips: 6,
            test_clips: 2,
            frames: 4,
            height: 16,
            width: 16,
            n_train: 600,
            n_test_id: 100,
            n_ood: 100,
            classes: 4,
            dim: 24,
            deep_dim: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeSpec {
    pub n_pairs: usize,
    pub regimes: Vec<Regime>,
    pub seed: u64,
    #[serde(default)]
    pub sizes: BenchSizes,
}

impl Default for RegimeSpec {
    fn default() -> Self {
        Self {
            n_pairs: 24,
            regimes: vec![
                Regime {
                    best_detector: "Mahalanobis".into(),
                    meta_feature_shift: vec![0.0, 0.0, 0.0, 0.0],
                    id_cluster_spread: 0.1,
                    ood_shift: 0.5,
                },
                Regime {
                    best_detector: "kNN".into(),
                    meta_feature_shift: vec![50.0, 8.0, 1.5, 1.5],
                    id_cluster_spread: 0.1,
                    ood_shift: 1.0,
                },
            ],
            seed: 7,
            sizes: BenchSizes::default(),
        }
    }
}

impl RegimeSpec {
    pub fn validate(&self, registry: &Registry) -> Result<Vec<Archetype>> {
        if self.n_pairs < 2 {
            return Err(Error::invalid("a benchmark needs at least 2 pairs"));
        }
        if self.regimes.is_empty() {
            return Err(Error::invalid("a benchmark needs at least one regime"));
        }
        self.regimes
            .iter()
            .map(|r| {
                registry.index_of(&r.best_detector)?;
                if r.meta_feature_shift.len() > 4 || r.meta_feature_shift.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid("meta_feature_shift takes at most 4 finite entries"));
                }
                let id = DetectorId::parse_loose(&r.best_detector)
                    .ok_or_else(|| Error::UnknownModel(r.best_detector.clone()))?;
                Archetype::for_detector(id)
            })
            .collect()
    }

    /// Regime of pair `i`: pairs are assigned round-robin.
    pub fn regime_of(&self, i: usize) -> usize {
        i % self.regimes.len()
    }
}

pub fn pair_id(i: usize) -> String {
    format!("pair_{i:03}")
}

struct MediaParams {
    brightness: f64,
    noise: f64,
    direction: f64,
    magnitude: f64,
}

const FLOW_JITTER: f64 = 0.3;

fn media_params(regime: &Regime, rng: &mut SplitMix64) -> MediaParams {
    let s = |k: usize| regime.meta_feature_shift.get(k).copied().unwrap_or(0.0);
    MediaParams {
        brightness: (100.0 + s(0) + rng.uniform(-8.0, 8.0)).clamp(0.0, 255.0),
        noise: (12.0 + s(1) + rng.uniform(-2.0, 2.0)).max(0.0),
        direction: s(2) + rng.uniform(-0.2, 0.2),
        magnitude: (1.0 + s(3) + rng.uniform(-0.2, 0.2)).max(0.0),
    }
}

fn write_pair(spec: &RegimeSpec, archetypes: &[Archetype], i: usize, root: &Path) -> Result<DatasetPair> {
    let sz = &spec.sizes;
    let r = spec.regime_of(i);
    let regime = &spec.regimes[r];
    let seed = splitmix64(spec.seed, i as u64);
    let id = pair_id(i);
    let dir = root.join("pairs").join(&id);
    let mut pair = DatasetPair::new(&id);
    pair.base_dir = dir.clone();

    let mp = media_params(regime, &mut SplitMix64::new(splitmix64(seed, 0)));
    pair.description = format!(
        "Synthetic video dataset pair {id}: RGB clips of {}x{} pixels and {} frames with mean brightness \
         {:.1} and pixel noise {:.1}; optical flow moving at {:.2} rad with speed {:.2} px/frame. \
         {} ID training samples over {} classes; the test set mixes {} ID and {} OOD samples.",
        sz.width,
        sz.height,
        sz.frames,
        mp.brightness,
        mp.noise,
        mp.direction,
        mp.magnitude,
        sz.n_train,
        sz.classes,
        sz.n_test_id,
        sz.n_ood,
    );

    let mut clip_seed = 1u64;
    let mut video = ClipLists::default();
    let mut flow = ClipLists::default();
    for (side, count) in [("train", sz.train_clips), ("test", sz.test_clips)] {
        for k in 0..count {
            let vs = splitmix64(seed, 100 + clip_seed);
            let fs = splitmix64(seed, 200 + clip_seed);
            clip_seed += 1;
            let vrel = PathBuf::from(format!("video/{side}_{k:02}.m3vd"));
            let frel = PathBuf::from(format!("flow/{side}_{k:02}.m3fl"));
            let v = synth_video_clip(sz.frames, sz.height, sz.width, mp.brightness, mp.noise, vs)?;
            let f = synth_flow_clip(sz.frames, sz.height, sz.width, mp.direction, mp.magnitude, FLOW_JITTER, fs)?;
            write_video_file(&v, &dir.join(&vrel))?;
            write_flow_file(&f, &dir.join(&frel))?;
            let (vl, fl) =
                if side == "train" { (&mut video.train, &mut flow.train) } else { (&mut video.test, &mut flow.test) };
            vl.push(vrel);
            fl.push(frel);
        }
    }
    pair.modalities.insert(Modality::Video, video);
    pair.modalities.insert(Modality::Flow, flow);

    let shape =
        ExportShape { n_train: sz.n_train, n_test_id: sz.n_test_id, n_ood: sz.n_ood, classes: sz.classes, dim: sz.dim };
    let (train, test) =
        synth_archetype_export(archetypes[r], shape, regime.id_cluster_spread, regime.ood_shift, splitmix64(seed, 1))?;
    for (role, export, rel) in [(ExportRole::Train, &train, "exports/train"), (ExportRole::Test, &test, "exports/test")]
    {
        write_feature_export(export, &dir.join(rel))?;
        pair.exports.insert(role, PathBuf::from(rel));
    }

    // Stand-in backbone embeddings: a regime centroid plus pair- and
    // clip-level noise.
    if sz.deep_dim > 0 {
        for (modality, tag, k) in [(Modality::Video, "video", 2u64), (Modality::Flow, "flow", 3u64)] {
            let mut crng = SplitMix64::new(splitmix64(splitmix64(spec.seed ^ 0x5EED, r as u64), k));
            let centroid: Vec<f64> = (0..sz.deep_dim).map(|_| crng.next_normal()).collect();
            let mut prng = SplitMix64::new(splitmix64(seed, k));
            let offset: Vec<f64> = (0..sz.deep_dim).map(|_| 0.2 * prng.next_normal()).collect();
            let rows = (0..sz.train_clips.max(1))
                .map(|_| centroid.iter().zip(&offset).map(|(c, o)| c + o + 0.3 * prng.next_normal()).collect())
                .collect();
            let rel = PathBuf::from(format!("deep/{tag}.emb"));
            write_embedding_file(&EmbeddingFile::new(format!("{id}/{tag}"), rows)?, &dir.join(&rel))?;
            pair.deep_embeddings.insert(modality, rel);
        }
    }

    write_pair_manifest(&pair, &dir.join("pair.json"))?;
    Ok(pair)
}

/// Writes a full benchmark tree under `out_dir` and returns its pairs and the
/// detector-zoo AUROC matrix (also written as `oracle.csv`).
pub fn synth_benchmark(
    spec: &RegimeSpec,
    out_dir: &Path,
    registry: &Registry,
    params: &DetectorParams,
    exec: Exec,
) -> Result<(Vec<DatasetPair>, PerformanceMatrix)> {
    let archetypes = spec.validate(registry)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(format!("creating {}", out_dir.display()), e))?;
    let pairs = exec.try_map_range(spec.n_pairs, |i| write_pair(spec, &archetypes, i, out_dir))?;
    let oracle = build_performance_matrix(&pairs, registry, params, exec)?;
    access::write_bytes(&out_dir.join("oracle.csv"), oracle.to_csv().as_bytes())?;
    let index = BenchmarkIndex {
        pairs: (0..spec.n_pairs).map(|i| PathBuf::from(format!("pairs/{}/pair.json", pair_id(i)))).collect(),
        oracle: PathBuf::from("oracle.csv"),
        regimes: Some((0..spec.n_pairs).map(|i| spec.regime_of(i)).collect()),
        seed: Some(spec.seed),
    };
    let mut text = serde_json::to_string_pretty(&index).expect("index serializes");
    text.push('\n');
    access::write_bytes(&out_dir.join("benchmark.json"), text.as_bytes())?;
    Ok((pairs, oracle))
}

/// Angle of the mean flow vector, in `(-π, π]`.
pub fn mean_flow_angle(flow: &FlowClip) -> f64 {
    let (mut sx, mut sy) = (0.0, 0.0);
    for (dx, dy) in flow.vectors() {
        sx += dx;
        sy += dy;
    }
    let a = sy.atan2(sx);
    if a <= -PI {
        a + 2.0 * PI
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::{auroc, fit_and_score};

    #[test]
    fn video_noise_free_and_deterministic() {
        let c = synth_video_clip(2, 8, 8, 99.6, 0.0, 3).unwrap();
        assert!(c.data().iter().all(|&v| v == 100));
        let a = synth_video_clip(4, 16, 16, 128.0, 10.0, 9).unwrap();
        assert_eq!(a, synth_video_clip(4, 16, 16, 128.0, 10.0, 9).unwrap());
        assert_ne!(a, synth_video_clip(4, 16, 16, 128.0, 10.0, 10).unwrap());
        assert!(synth_video_clip(1, 4, 8, 10.0, 1.0, 0).is_err());
        assert!(synth_video_clip(1, 8, 8, 300.0, 1.0, 0).is_err());
    }

    #[test]
    fn video_mean_within_bound() {
        let c = synth_video_clip(8, 16, 16, 128.0, 10.0, 1).unwrap();
        let n = c.data().len() as f64;
        let mean = c.data().iter().map(|&v| v as f64).sum::<f64>() / n;
        assert!((124.0..=132.0).contains(&mean), "{mean}");
        // Rounding adds at most 0.5 of bias on top of 3σ/√n.
        assert!((mean - 128.0).abs() <= 3.0 * 10.0 / n.sqrt() + 0.5, "{mean}");
    }

    #[test]
    fn flow_directions() {
        let f = synth_flow_clip(1, 8, 8, 0.0, 2.0, 0.0, 1).unwrap();
        assert!(f.vectors().all(|(dx, dy)| dx == 2.0 && dy == 0.0));
        let f = synth_flow_clip(1, 8, 8, PI / 2.0, 2.0, 0.0, 1).unwrap();
        assert!(f.vectors().all(|(dx, dy)| dx.abs() < 1e-6 && (dy - 2.0).abs() < 1e-6));
        let j = synth_flow_clip(4, 16, 16, 1.0, 1.0, 0.3, 5).unwrap();
        assert_eq!(j, synth_flow_clip(4, 16, 16, 1.0, 1.0, 0.3, 5).unwrap());
        assert!((mean_flow_angle(&j) - 1.0).abs() < 0.3 * 4.0 / (1024f64).sqrt());
        assert!(synth_flow_clip(1, 8, 8, 0.0, -1.0, 0.0, 1).is_err());
    }

    #[test]
    fn energy_separates_large_shift() {
        let (train, test) = synth_feature_export(100, 100, 4, 16, 0.1, 10.0, 11).unwrap();
        let s = fit_and_score(DetectorId::EnergyBased, &train, &test, &DetectorParams::default()).unwrap();
        let a = auroc(&s, test.ood_labels.as_ref().unwrap()).unwrap();
        assert!(a > 0.95, "{a}");
        let again = synth_feature_export(100, 100, 4, 16, 0.1, 10.0, 11).unwrap();
        assert_eq!((train, test), again);
    }

    #[test]
    fn logits_match_head() {
        let (train, _) = synth_feature_export(8, 8, 3, 5, 0.2, 1.0, 2).unwrap();
        let head = train.head.as_ref().unwrap();
        for i in 0..train.n_samples() {
            let l = head.logits(&train.feature_row(i));
            for (a, b) in l.iter().zip(train.logit_row(i)) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bad_shapes() {
        assert!(synth_feature_export(3, 8, 4, 8, 0.1, 1.0, 0).is_err());
        assert!(synth_feature_export(8, 8, 4, 3, 0.1, 1.0, 0).is_err());
        let shape = ExportShape { n_train: 8, n_test_id: 4, n_ood: 4, classes: 4, dim: 4 };
        assert!(synth_archetype_export(Archetype::Covariance, shape, 0.1, 1.0, 0).is_err());
        assert!(Archetype::for_detector(DetectorId::Msp).is_err());
    }
}
