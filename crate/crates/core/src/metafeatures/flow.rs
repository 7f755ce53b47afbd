//! Optical-flow descriptors.

use super::stats::basic_stats;
use crate::data_model::FlowClip;

/// Orientation bin of a nonzero vector. Bin `k` covers
/// `(−π + kπ/4, −π + (k+1)π/4]`; boundaries are resolved with exact
/// comparisons instead of floating-point angles.
fn orientation_bin(dx: f64, dy: f64) -> usize {
    let (ax, ay) = (dx.abs(), dy.abs());
    if dy > 0.0 {
        if dx >= dy {
            4 // (0, π/4]
        } else if dx >= 0.0 {
            5 // (π/4, π/2]
        } else if ax <= dy {
            6 // (π/2, 3π/4]
        } else {
            7 // (3π/4, π)
        }
    } else if dy < 0.0 {
        if dx < 0.0 && ax >= ay {
            0 // (−π, −3π/4]
        } else if dx <= 0.0 {
            1 // (−3π/4, −π/2]
        } else if dx <= ay {
            2 // (−π/2, −π/4]
        } else {
            3 // (−π/4, 0)
        }
    } else if dx > 0.0 {
        3 // angle 0
    } else {
        7 // angle π
    }
}

/// Eight-bin magnitude-weighted orientation histogram, normalized to sum 1,
/// or all zeros when the clip has no motion.
pub fn hof_histogram(flow: &FlowClip) -> [f64; 8] {
    let mut hist = [0.0; 8];
    for (dx, dy) in flow.vectors() {
        let m = dx.hypot(dy);
        if m > 0.0 {
            hist[orientation_bin(dx, dy)] += m;
        }
    }
    let total: f64 = hist.iter().sum();
    if total > 0.0 {
        hist.iter_mut().for_each(|v| *v /= total);
    }
    hist
}

pub fn magnitudes(flow: &FlowClip) -> Vec<f64> {
    flow.vectors().map(|(dx, dy)| (dx * dx + dy * dy).sqrt()).collect()
}

/// `(mean, std, IQR, outside 1–99th percentile, outside μ±3σ)` of the
/// per-pixel flow magnitudes.
pub fn flow_mag_stats(flow: &FlowClip) -> [f64; 5] {
    let s = basic_stats(&magnitudes(flow)).expect("flow clip has at least one vector");
    [s.mean, s.std, s.iqr, s.outside_p1_p99, s.outside_3sigma]
}
