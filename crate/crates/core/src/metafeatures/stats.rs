//! Distributional summary statistics.
//!
//! Undefined quantities (skew/kurtosis at zero spread, CV or Gini at zero
//! mean) are reported as 0, and any non-finite result is replaced by 0.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BasicStats {
    pub mean: f64,
    pub std: f64,
    pub skew: f64,
    pub kurtosis: f64,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    pub iqr: f64,
    pub gini: f64,
    pub mad: f64,
    pub aad: f64,
    pub cv: f64,
    pub outside_p1_p99: f64,
    pub outside_3sigma: f64,
}

impl BasicStats {
    pub const LEN: usize = 14;

    pub const NAMES: [&'static str; 14] = [
        "mean",
        "std",
        "skew",
        "kurt",
        "min",
        "max",
        "median",
        "iqr",
        "gini",
        "mad",
        "aad",
        "cv",
        "p_out_1pct",
        "p_out_3sigma",
    ];

    pub fn to_array(&self) -> [f64; 14] {
        [
            self.mean,
            self.std,
            self.skew,
            self.kurtosis,
            self.min,
            self.max,
            self.median,
            self.iqr,
            self.gini,
            self.mad,
            self.aad,
            self.cv,
            self.outside_p1_p99,
            self.outside_3sigma,
        ]
    }
}

/// Quantile of sorted data by linear interpolation between order statistics.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

fn finite_or_zero(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        0.0
    }
}

pub fn basic_stats(values: &[f64]) -> Result<BasicStats> {
    if values.is_empty() {
        return Err(Error::invalid("basic_stats of an empty sequence"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("basic_stats input must be finite"));
    }
    let n = values.len() as f64;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);

    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4, mut abs_dev) = (0.0, 0.0, 0.0, 0.0);
    for &x in values {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
        abs_dev += d.abs();
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let std = m2.sqrt();
    let (skew, kurtosis) = if std > 0.0 { (m3 / (std * std * std), m4 / (m2 * m2) - 3.0) } else { (0.0, 0.0) };

    let median = quantile_sorted(&sorted, 0.5);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);

    let mut deviations: Vec<f64> = values.iter().map(|x| (x - median).abs()).collect();
    deviations.sort_by(f64::total_cmp);
    let mad = quantile_sorted(&deviations, 0.5);

    // Σᵢⱼ|xᵢ−xⱼ| = 2 Σₖ (2k − n − 1) x₍ₖ₎ over 1-based order statistics.
    let pair_sum: f64 =
        2.0 * sorted.iter().enumerate().map(|(k, &x)| (2.0 * (k + 1) as f64 - n - 1.0) * x).sum::<f64>();
    let gini = if mean != 0.0 { pair_sum / (2.0 * n * n * mean) } else { 0.0 };
    let cv = if mean != 0.0 { std / mean } else { 0.0 };

    let (q01, q99) = (quantile_sorted(&sorted, 0.01), quantile_sorted(&sorted, 0.99));
    let outside_p1_p99 = values.iter().filter(|&&x| x < q01 || x > q99).count() as f64 / n;
    let (lo, hi) = (mean - 3.0 * std, mean + 3.0 * std);
    let outside_3sigma = values.iter().filter(|&&x| x < lo || x > hi).count() as f64 / n;

    Ok(BasicStats {
        mean: finite_or_zero(mean),
        std: finite_or_zero(std),
        skew: finite_or_zero(skew),
        kurtosis: finite_or_zero(kurtosis),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        median,
        iqr: finite_or_zero(iqr),
        gini: finite_or_zero(gini),
        mad: finite_or_zero(mad),
        aad: finite_or_zero(abs_dev / n),
        cv: finite_or_zero(cv),
        outside_p1_p99,
        outside_3sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_input() {
        let s = basic_stats(&[5.0, 5.0, 5.0]).unwrap();
        assert_eq!(s.mean, 5.0);
        assert_eq!(s.std, 0.0);
        assert_eq!(s.skew, 0.0);
        assert_eq!(s.kurtosis, 0.0);
        assert_eq!(s.gini, 0.0);
        assert_eq!(s.cv, 0.0);
        assert_eq!(s.outside_p1_p99, 0.0);
        assert_eq!(s.outside_3sigma, 0.0);
        assert_eq!((s.min, s.median, s.max), (5.0, 5.0, 5.0));
    }

    #[test]
    fn gini_of_zero_one() {
        // Σ|xᵢ−xⱼ| = 2; 2 / (2·2²·0.5) = 0.5
        assert_eq!(basic_stats(&[0.0, 1.0]).unwrap().gini, 0.5);
    }

    #[test]
    fn symmetric_sample() {
        let s = basic_stats(&[-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.skew, 0.0);
        assert_eq!(s.median, 0.0);
        assert_eq!(s.mad, 1.0);
        assert_eq!(s.aad, 1.2);
        assert!((s.std - 2f64.sqrt()).abs() < 1e-15);
        // m4 = (16+1+0+1+16)/5 = 6.8, σ⁴ = 4 → 1.7 − 3
        assert!((s.kurtosis - (-1.3)).abs() < 1e-12);
        assert_eq!(s.iqr, 2.0);
        assert_eq!(s.cv, 0.0);
    }

    #[test]
    fn gini_matches_pairwise_definition() {
        let xs = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0];
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let mut pair = 0.0;
        for a in xs {
            for b in xs {
                pair += f64::abs(a - b);
            }
        }
        let g = basic_stats(&xs).unwrap().gini;
        assert!((g - pair / (2.0 * n * n * mean)).abs() < 1e-14);
    }

    #[test]
    fn outlier_fractions() {
        let mut xs: Vec<f64> = (0..100).map(|i| i as f64).collect();
        xs.push(1e4);
        let s = basic_stats(&xs).unwrap();
        assert!(s.outside_3sigma > 0.0);
        // q01 = 1, q99 = 99 → 0 and 1e4 lie strictly outside
        assert!((s.outside_p1_p99 - 2.0 / 101.0).abs() < 1e-15);
    }

    #[test]
    fn empty_is_error() {
        assert!(basic_stats(&[]).is_err());
    }

    proptest! {
        #[test]
        fn invariants(xs in proptest::collection::vec(0.0f64..1e3, 1..80)) {
            let s = basic_stats(&xs).unwrap();
            for v in s.to_array() {
                prop_assert!(v.is_finite());
            }
            prop_assert!(s.iqr >= 0.0);
            prop_assert!(s.min <= s.median && s.median <= s.max);
            if s.mean > 0.0 {
                prop_assert!(s.gini >= 0.0 && s.gini < 1.0);
            }
        }

        #[test]
        fn adversarial_inputs_stay_finite(xs in proptest::collection::vec(
            prop_oneof![Just(0.0), Just(-0.0), Just(1e-300), Just(1e150), -1e150f64..1e150], 1..30)) {
            let s = basic_stats(&xs).unwrap();
            for v in s.to_array() {
                prop_assert!(v.is_finite());
            }
        }
    }
}
