//! Per-clip visual descriptors: colourfulness, Canny edge density and GLCM
//! entropy.

use std::collections::VecDeque;

use crate::data_model::VideoClip;

/// Hasler–Süsstrunk colourfulness over every pixel of every frame jointly.
pub fn colourfulness(clip: &VideoClip) -> f64 {
    let n = (clip.data().len() / 3) as f64;
    let (mut s_rg, mut s_yb, mut ss_rg, mut ss_yb) = (0.0, 0.0, 0.0, 0.0);
    for px in clip.data().chunks_exact(3) {
        let (r, g, b) = (px[0] as f64, px[1] as f64, px[2] as f64);
        let rg = r - g;
        let yb = 0.5 * (r + g) - b;
        s_rg += rg;
        s_yb += yb;
        ss_rg += rg * rg;
        ss_yb += yb * yb;
    }
    let (mu_rg, mu_yb) = (s_rg / n, s_yb / n);
    let var_rg = (ss_rg / n - mu_rg * mu_rg).max(0.0);
    let var_yb = (ss_yb / n - mu_yb * mu_yb).max(0.0);
    (var_rg + var_yb).sqrt() + 0.3 * (mu_rg * mu_rg + mu_yb * mu_yb).sqrt()
}

struct Plane {
    h: usize,
    w: usize,
    v: Vec<f64>,
}

impl Plane {
    #[inline]
    fn at_clamped(&self, r: isize, c: isize) -> f64 {
        let r = r.clamp(0, self.h as isize - 1) as usize;
        let c = c.clamp(0, self.w as isize - 1) as usize;
        self.v[r * self.w + c]
    }
}

fn gaussian_kernel_5(sigma: f64) -> [f64; 5] {
    let mut k = [0.0; 5];
    for (i, kv) in k.iter_mut().enumerate() {
        let x = i as f64 - 2.0;
        *kv = (-x * x / (2.0 * sigma * sigma)).exp();
    }
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

fn blur(p: &Plane, k: &[f64; 5]) -> Plane {
    let (h, w) = (p.h, p.w);
    let mut tmp = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            tmp[r * w + c] = (0..5).map(|i| k[i] * p.at_clamped(r as isize, c as isize + i as isize - 2)).sum();
        }
    }
    let tmp = Plane { h, w, v: tmp };
    let mut out = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            out[r * w + c] = (0..5).map(|i| k[i] * tmp.at_clamped(r as isize + i as isize - 2, c as isize)).sum();
        }
    }
    Plane { h, w, v: out }
}

/// Fraction of pixels marked as edges by Canny, averaged over frames.
///
/// Per frame: luma, 5×5 Gaussian (σ = 1.4), Sobel, non-maximum suppression
/// over four directions, then hysteresis at 0.1 / 0.3 of the frame's maximum
/// gradient magnitude with 8-connectivity.
pub fn edge_density(clip: &VideoClip) -> f64 {
    let total: f64 = (0..clip.frames())
        .map(|t| {
            let edges = canny_frame(clip.height(), clip.width(), clip.frame_luma(t));
            edges.iter().filter(|&&e| e).count() as f64 / (clip.height() * clip.width()) as f64
        })
        .sum();
    total / clip.frames() as f64
}

/// Canny edge map of one luma plane.
pub fn canny_frame(h: usize, w: usize, luma: Vec<f64>) -> Vec<bool> {
    const LOW: f64 = 0.1;
    const HIGH: f64 = 0.3;
    // Magnitudes below this are treated as flat (rounding residue).
    const FLAT: f64 = 1e-6;

    let smooth = blur(&Plane { h, w, v: luma }, &gaussian_kernel_5(1.4));
    let mut mag = vec![0.0; h * w];
    let mut dir = vec![0u8; h * w];
    for r in 0..h as isize {
        for c in 0..w as isize {
            let p = |dr: isize, dc: isize| smooth.at_clamped(r + dr, c + dc);
            let gx = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
            let gy = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
            let i = r as usize * w + c as usize;
            let m = gx.hypot(gy);
            mag[i] = if m < FLAT { 0.0 } else { m };
            let mut deg = gy.atan2(gx).to_degrees();
            if deg < 0.0 {
                deg += 180.0;
            }
            dir[i] = if !(22.5..157.5).contains(&deg) {
                0
            } else if deg < 67.5 {
                1
            } else if deg < 112.5 {
                2
            } else {
                3
            };
        }
    }
    let max = mag.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return vec![false; h * w];
    }
    let tol = 1e-9 * max;
    let at = |r: isize, c: isize| {
        if r < 0 || c < 0 || r >= h as isize || c >= w as isize {
            0.0
        } else {
            mag[r as usize * w + c as usize]
        }
    };
    let mut thin = vec![0.0; h * w];
    for r in 0..h as isize {
        for c in 0..w as isize {
            let i = r as usize * w + c as usize;
            let m = mag[i];
            if m == 0.0 {
                continue;
            }
            // Image rows grow downward, so 45° points down-right.
            let (a, b) = match dir[i] {
                0 => (at(r, c - 1), at(r, c + 1)),
                1 => (at(r - 1, c - 1), at(r + 1, c + 1)),
                2 => (at(r - 1, c), at(r + 1, c)),
                _ => (at(r - 1, c + 1), at(r + 1, c - 1)),
            };
            if m + tol >= a && m + tol >= b {
                thin[i] = m;
            }
        }
    }
    let (lo, hi) = (LOW * max, HIGH * max);
    let mut edge = vec![false; h * w];
    let mut queue = VecDeque::new();
    for (i, &m) in thin.iter().enumerate() {
        if m >= hi {
            edge[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (r, c) = ((i / w) as isize, (i % w) as isize);
        for dr in -1..=1 {
            for dc in -1..=1 {
                let (nr, nc) = (r + dr, c + dc);
                if nr < 0 || nc < 0 || nr >= h as isize || nc >= w as isize {
                    continue;
                }
                let j = nr as usize * w + nc as usize;
                if !edge[j] && thin[j] >= lo {
                    edge[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    edge
}

/// Mean over frames of the Shannon entropy (bits) of the horizontal-neighbour
/// grey-level co-occurrence table, with luma quantized to 16 levels.
pub fn glcm_entropy(clip: &VideoClip) -> f64 {
    let (h, w) = (clip.height(), clip.width());
    let total: f64 = (0..clip.frames())
        .map(|t| {
            let levels: Vec<usize> =
                clip.frame_luma(t).into_iter().map(|y| ((y / 16.0).floor() as usize).min(15)).collect();
            let mut counts = [0u64; 256];
            for r in 0..h {
                for c in 0..w - 1 {
                    counts[levels[r * w + c] * 16 + levels[r * w + c + 1]] += 1;
                }
            }
            let n = (h * (w - 1)) as f64;
            counts
                .iter()
                .filter(|&&k| k > 0)
                .map(|&k| {
                    let p = k as f64 / n;
                    -p * p.log2()
                })
                .sum::<f64>()
        })
        .sum();
    total / clip.frames() as f64
}
