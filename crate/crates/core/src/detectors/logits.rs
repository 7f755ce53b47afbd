//! Detectors that read only the logits of one sample.

use crate::error::{Error, Result};

fn check_finite(row: &[f64]) -> Result<()> {
    if row.is_empty() || row.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("logits must be a nonempty finite vector"));
    }
    Ok(())
}

/// `ln Σ exp(v)` with max-shift.
pub fn logsumexp(row: &[f64]) -> f64 {
    let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + row.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

pub fn softmax(row: &[f64]) -> Vec<f64> {
    let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = row.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

pub fn msp_score(row: &[f64]) -> Result<f64> {
    check_finite(row)?;
    Ok(softmax(row).into_iter().fold(0.0, f64::max))
}

pub fn maxlogit_score(row: &[f64]) -> Result<f64> {
    check_finite(row)?;
    Ok(row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// Negative free energy `T·logsumexp(v/T)`.
pub fn energy_score(row: &[f64], temperature: f64) -> Result<f64> {
    check_finite(row)?;
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::invalid(format!("energy temperature must be positive, got {temperature}")));
    }
    let scaled: Vec<f64> = row.iter().map(|v| v / temperature).collect();
    Ok(temperature * logsumexp(&scaled))
}

/// Generalized-entropy score `−Σ p^γ (1−p)^γ` over the `top_m` largest
/// softmax probabilities.
pub fn gen_score(row: &[f64], gamma: f64, top_m: usize) -> Result<f64> {
    check_finite(row)?;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::invalid(format!("GEN gamma must be in (0, 1), got {gamma}")));
    }
    if top_m == 0 {
        return Err(Error::invalid("GEN needs M ≥ 1"));
    }
    let mut p = softmax(row);
    p.sort_by(|a, b| b.total_cmp(a));
    p.truncate(top_m.min(row.len()));
    Ok(-p.iter().map(|&q| q.powf(gamma) * (1.0 - q).powf(gamma)).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msp_examples() {
        assert!((msp_score(&[1.0; 4]).unwrap() - 0.25).abs() < 1e-15);
        let expected = 1.0 / (1.0 + (-10f64).exp());
        assert!((msp_score(&[10.0, 0.0]).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.9999546).abs() < 1e-7);
        let a = msp_score(&[0.3, -2.0, 1.7]).unwrap();
        let b = msp_score(&[100.3, 98.0, 101.7]).unwrap();
        assert!((a - b).abs() <= 1e-12);
        assert!(msp_score(&[f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn maxlogit_examples() {
        assert_eq!(maxlogit_score(&[2.0, -1.0, 0.5]).unwrap(), 2.0);
        assert_eq!(maxlogit_score(&[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(maxlogit_score(&[0.5, 2.0, -1.0]).unwrap(), 2.0);
    }

    #[test]
    fn energy_examples() {
        assert!((energy_score(&[0.0, 0.0], 1.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(energy_score(&[5.0], 1.0).unwrap(), 5.0);
        assert!(energy_score(&[1.0, 2.0], 0.0).is_err());
        assert!(energy_score(&[1.0, 2.0], -1.0).is_err());
        let mut rng = crate::rng::SplitMix64::new(5);
        for _ in 0..200 {
            let row: Vec<f64> = (0..5).map(|_| rng.normal(0.0, 10.0)).collect();
            assert!(energy_score(&row, 1.0).unwrap() >= maxlogit_score(&row).unwrap());
        }
        // large logits do not overflow
        assert!((energy_score(&[1000.0, 1000.0], 1.0).unwrap() - (1000.0 + 2f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn gen_examples() {
        let uniform = gen_score(&[0.0, 0.0], 0.1, 100).unwrap();
        assert!((uniform + 2.0 * 0.5f64.powf(0.2)).abs() < 1e-12);
        assert!((uniform + 1.7411).abs() < 1e-4);
        let confident = gen_score(&[250.0, 0.0, 0.0], 0.1, 100).unwrap();
        assert!(confident > -1e-3 && confident <= 0.0);
        for c in 2..8 {
            let mut hot = vec![0.0; c];
            hot[0] = 20.0;
            assert!(gen_score(&hot, 0.1, 100).unwrap() > gen_score(&vec![0.0; c], 0.1, 100).unwrap());
        }
        assert!(gen_score(&[0.0, 1.0], 0.0, 100).is_err());
        assert!(gen_score(&[0.0, 1.0], 1.0, 100).is_err());
    }

    #[test]
    fn class_permutation_equivariance() {
        let row = [0.4, -1.2, 3.3, 0.0];
        let perm = [3.3, 0.0, 0.4, -1.2];
        assert!((msp_score(&row).unwrap() - msp_score(&perm).unwrap()).abs() < 1e-15);
        assert_eq!(maxlogit_score(&row).unwrap(), maxlogit_score(&perm).unwrap());
        assert!((energy_score(&row, 1.0).unwrap() - energy_score(&perm, 1.0).unwrap()).abs() < 1e-12);
        assert!((gen_score(&row, 0.1, 100).unwrap() - gen_score(&perm, 0.1, 100).unwrap()).abs() < 1e-12);
    }
}
