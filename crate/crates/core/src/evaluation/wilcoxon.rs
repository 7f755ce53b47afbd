//! Wilcoxon signed-rank test for paired samples.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::detectors::average_ranks;
use crate::error::{Error, Result};

/// Largest number of nonzero differences handled by the exact null.
pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedRankResult {
    pub w_plus: f64,
    pub p_two_sided: f64,
    pub n_nonzero: usize,
}

/// Number of sign assignments reaching each doubled rank sum.
fn null_counts(doubled_ranks: &[u64]) -> Vec<u64> {
    let total: u64 = doubled_ranks.iter().sum();
    let mut counts = vec![0u64; total as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in doubled_ranks {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] > 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    counts
}

/// Two-sided p from the exact null given the doubled ranks and the observed
/// doubled `W⁺`.
pub fn exact_p(doubled_ranks: &[u64], observed: u64) -> f64 {
    let counts = null_counts(doubled_ranks);
    let total = 2f64.powi(doubled_ranks.len() as i32);
    let lower: u64 = counts[..=(observed as usize).min(counts.len() - 1)].iter().sum();
    let upper: u64 = counts[(observed as usize).min(counts.len())..].iter().sum();
    (2.0 * lower.min(upper) as f64 / total).min(1.0)
}

pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64]) -> Result<SignedRankResult> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::invalid(format!(
            "signed-rank test needs equal nonempty samples, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|v| *v != 0.0).collect();
    let n = d.len();
    if n == 0 {
        return Ok(SignedRankResult { w_plus: 0.0, p_two_sided: 1.0, n_nonzero: 0 });
    }
    let ranks = average_ranks(&d.iter().map(|v| v.abs()).collect::<Vec<_>>());
    let w_plus: f64 = ranks.iter().zip(&d).filter(|(_, v)| **v > 0.0).map(|(r, _)| r).sum();
    let p = if n <= EXACT_MAX_N {
        let doubled: Vec<u64> = ranks.iter().map(|r| (2.0 * r).round() as u64).collect();
        exact_p(&doubled, (2.0 * w_plus).round() as u64)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let mut tie_term = 0.0;
        let mut sorted = ranks.clone();
        sorted.sort_by(f64::total_cmp);
        let mut i = 0;
        while i < sorted.len() {
            let mut j = i;
            while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
                j += 1;
            }
            let t = (j - i + 1) as f64;
            tie_term += t * t * t - t;
            i = j + 1;
        }
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
        if var <= 0.0 {
            1.0
        } else {
            let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
            let normal = Normal::new(0.0, 1.0).expect("standard normal");
            (2.0 * (1.0 - normal.cdf(z))).min(1.0)
        }
    };
    Ok(SignedRankResult { w_plus, p_two_sided: p, n_nonzero: n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_samples() {
        let r = wilcoxon_signed_rank(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.p_two_sided, 1.0);
    }

    #[test]
    fn small_examples() {
        let r = wilcoxon_signed_rank(&[1.0, 2.0, 3.0], &[0.0; 3]).unwrap();
        assert_eq!(r.w_plus, 6.0);
        assert_eq!(r.p_two_sided, 0.25);
        let r = wilcoxon_signed_rank(&[2.0; 5], &[1.0, 0.5, 0.25, -1.0, 0.0]).unwrap();
        assert_eq!(r.p_two_sided, 0.0625);
        let r = wilcoxon_signed_rank(&[1.0; 6], &[2.0; 6]).unwrap();
        assert_eq!(r.p_two_sided, 0.03125);
    }

    #[test]
    fn symmetric_in_arguments() {
        let x = [0.3, 1.2, -0.4, 2.2, 0.0, 1.1, 0.9];
        let y = [0.1, 1.5, -0.9, 1.1, 0.0, 1.1, 0.2];
        let a = wilcoxon_signed_rank(&x, &y).unwrap();
        let b = wilcoxon_signed_rank(&y, &x).unwrap();
        assert_eq!(a.p_two_sided, b.p_two_sided);
    }

    #[test]
    fn normal_branch_is_sane() {
        let x: Vec<f64> = (0..40).map(|i| i as f64 * 0.1 + 0.05).collect();
        let y = vec![0.0; 40];
        let r = wilcoxon_signed_rank(&x, &y).unwrap();
        assert!(r.p_two_sided < 1e-6);
        let x: Vec<f64> = (0..40).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } * (i + 1) as f64).collect();
        let r = wilcoxon_signed_rank(&x, &[0.0; 40]).unwrap();
        assert!(r.p_two_sided > 0.5);
    }

    #[test]
    fn length_mismatch() {
        assert!(wilcoxon_signed_rank(&[1.0], &[1.0, 2.0]).is_err());
    }
}
