//! Activation-shaping detectors: ReAct clipping and ASH pruning, both scored
//! by energy through the exported linear head.

use nalgebra::{DMatrix, DVector};

use super::logits::logsumexp;
use crate::data_model::LinearHead;
use crate::error::{Error, Result};
use crate::metafeatures::quantile_sorted;

fn head_energy(head: &LinearHead, z: &DVector<f64>) -> f64 {
    logsumexp(head.logits(z).as_slice())
}

/// Percentile (0–100) of every activation in the matrix.
pub fn activation_percentile(features: &DMatrix<f64>, percentile: f64) -> f64 {
    let mut all: Vec<f64> = features.iter().copied().collect();
    all.sort_by(f64::total_cmp);
    quantile_sorted(&all, percentile / 100.0)
}

pub fn react_score(features: &DMatrix<f64>, head: &LinearHead, clip: f64) -> Vec<f64> {
    (0..features.nrows())
        .map(|i| {
            let z = features.row(i).transpose().map(|v| v.min(clip));
            head_energy(head, &z)
        })
        .collect()
}

/// Number of activations ASH keeps out of `d` at prune percentile `p`.
pub fn ash_keep_count(d: usize, percentile: f64) -> usize {
    let keep = (d as f64 * (100.0 - percentile) / 100.0 - 1e-9).ceil();
    (keep.max(1.0) as usize).min(d)
}

/// Keeps the largest activations (ties keep the lower index), zeroes the
/// rest, and with `scale` multiplies the survivors by the ratio of the sums
/// before and after pruning.
pub fn ash_prune(z: &[f64], percentile: f64, scale: bool) -> Vec<f64> {
    let k = ash_keep_count(z.len(), percentile);
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| z[b].total_cmp(&z[a]).then(a.cmp(&b)));
    let mut out = vec![0.0; z.len()];
    for &i in &order[..k] {
        out[i] = z[i];
    }
    if scale {
        let before: f64 = z.iter().sum();
        let after: f64 = out.iter().sum();
        if after != 0.0 {
            let r = before / after;
            out.iter_mut().for_each(|v| *v *= r);
        }
    }
    out
}

pub fn ash_score(features: &DMatrix<f64>, head: &LinearHead, percentile: f64, scale: bool) -> Result<Vec<f64>> {
    if !(0.0..100.0).contains(&percentile) {
        return Err(Error::invalid(format!("ASH percentile must be in [0, 100), got {percentile}")));
    }
    Ok((0..features.nrows())
        .map(|i| {
            let row: Vec<f64> = features.row(i).iter().copied().collect();
            head_energy(head, &DVector::from_vec(ash_prune(&row, percentile, scale)))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn random_head(rng: &mut SplitMix64, c: usize, d: usize) -> LinearHead {
        LinearHead {
            weight: DMatrix::from_fn(c, d, |_, _| rng.normal(0.0, 1.0)),
            bias: DVector::from_fn(c, |_, _| rng.normal(0.0, 1.0)),
        }
    }

    #[test]
    fn limits_equal_energy() {
        let mut rng = SplitMix64::new(21);
        let head = random_head(&mut rng, 3, 5);
        let f = DMatrix::from_fn(12, 5, |_, _| rng.normal(0.0, 2.0));
        let r = react_score(&f, &head, f64::INFINITY);
        let a = ash_score(&f, &head, 0.0, false).unwrap();
        for i in 0..12 {
            let e = head_energy(&head, &f.row(i).transpose());
            assert!((r[i] - e).abs() <= 1e-9);
            assert!((a[i] - e).abs() <= 1e-9);
        }
    }

    #[test]
    fn react_full_clip() {
        let mut rng = SplitMix64::new(22);
        let mut head = random_head(&mut rng, 2, 3);
        head.bias = DVector::zeros(2);
        let f = DMatrix::from_row_slice(1, 3, &[1.0, -2.0, 0.5]);
        let s = react_score(&f, &head, 0.0)[0];
        let clipped = DVector::from_column_slice(&[0.0, -2.0, 0.0]);
        assert_eq!(s, logsumexp((&head.weight * clipped).as_slice()));
    }

    #[test]
    fn ash_examples() {
        assert_eq!(ash_prune(&[5.0, 1.0, 1.0, 1.0], 75.0, false), vec![5.0, 0.0, 0.0, 0.0]);
        assert_eq!(ash_prune(&[1.0, 3.0, 1.0, 1.0], 50.0, false), vec![1.0, 3.0, 0.0, 0.0]);
        assert_eq!(ash_prune(&[2.0, 2.0, 2.0, 2.0], 75.0, false), vec![2.0, 0.0, 0.0, 0.0]);
        assert_eq!(ash_prune(&[4.0, 1.0, 1.0, 2.0], 75.0, true), vec![8.0, 0.0, 0.0, 0.0]);
        assert_eq!(ash_keep_count(10, 90.0), 1);
        assert_eq!(ash_keep_count(24, 90.0), 3);
        assert_eq!(ash_keep_count(7, 0.0), 7);
    }

    #[test]
    fn percentile_of_activations() {
        let f = DMatrix::from_row_slice(2, 5, &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        assert!((activation_percentile(&f, 90.0) - 8.1).abs() < 1e-12);
    }
}
