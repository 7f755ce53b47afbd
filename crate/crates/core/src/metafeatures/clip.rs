//! The fixed 37-dimensional per-clip meta-feature vector.

use super::flow::{flow_mag_stats, hof_histogram};
use super::image::{colourfulness, edge_density, glcm_entropy};
use super::stats::{basic_stats, BasicStats};
use crate::data_model::{FlowClip, VideoClip};

pub const CLIP_FEATURE_DIM: usize = 37;

/// Names of the 37 clip features, in vector order.
pub fn clip_feature_names() -> Vec<String> {
    let mut names: Vec<String> = [
        "frames",
        "height",
        "width",
        "aspect",
        "flow_height",
        "flow_width",
        "flow_aspect",
        "colourfulness",
        "edge_density",
        "glcm_entropy",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    names.extend((0..8).map(|k| format!("hof_{k}")));
    names.extend(BasicStats::NAMES.iter().map(|s| format!("intensity_{s}")));
    names.extend(["mean", "std", "iqr", "p_out_1pct", "p_out_3sigma"].iter().map(|s| format!("flow_mag_{s}")));
    names
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClipFeatureVector(pub [f64; CLIP_FEATURE_DIM]);

impl ClipFeatureVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

pub fn clip_meta_features(video: &VideoClip, flow: &FlowClip) -> ClipFeatureVector {
    let mut v = Vec::with_capacity(CLIP_FEATURE_DIM);
    let (h, w) = (video.height() as f64, video.width() as f64);
    let (fh, fw) = (flow.height() as f64, flow.width() as f64);
    v.extend([video.frames() as f64, h, w, h / w, fh, fw, fh / fw]);
    v.extend([colourfulness(video), edge_density(video), glcm_entropy(video)]);
    v.extend(hof_histogram(flow));
    let luma: Vec<f64> = (0..video.frames()).flat_map(|t| video.frame_luma(t)).collect();
    v.extend(basic_stats(&luma).expect("video clip has pixels").to_array());
    v.extend(flow_mag_stats(flow));
    let mut out = [0.0; CLIP_FEATURE_DIM];
    for (o, x) in out.iter_mut().zip(v) {
        *o = if x.is_finite() { x } else { 0.0 };
    }
    ClipFeatureVector(out)
}
