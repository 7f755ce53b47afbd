//! AUROC and the threshold decision rule.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Id,
    Ood,
}

/// A score at or above the threshold is in-distribution.
pub fn classify(score: f64, threshold: f64) -> Decision {
    if score >= threshold {
        Decision::Id
    } else {
        Decision::Ood
    }
}

/// Average (1-based) ranks of `values`, ties sharing the mean of their
/// positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Tie-aware Mann–Whitney AUROC with higher scores meaning in-distribution:
/// `P(s_ID > s_OOD) + ½·P(s_ID = s_OOD)`.
pub fn auroc(scores: &[f64], ood: &[bool]) -> Result<f64> {
    if scores.len() != ood.len() {
        return Err(Error::invalid(format!("{} scores for {} labels", scores.len(), ood.len())));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Numerical("non-finite OOD score".into()));
    }
    let n_ood = ood.iter().filter(|&&o| o).count();
    let n_id = ood.len() - n_ood;
    if n_id == 0 || n_ood == 0 {
        return Err(Error::DegenerateTestLabels("AUROC needs both ID and OOD samples".into()));
    }
    let ranks = average_ranks(scores);
    let r_id: f64 = ranks.iter().zip(ood).filter(|(_, &o)| !o).map(|(r, _)| r).sum();
    let (n_id, n_ood) = (n_id as f64, n_ood as f64);
    Ok((r_id - n_id * (n_id + 1.0) / 2.0) / (n_id * n_ood))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(auroc(&[2.0, 3.0, 0.0, 1.0], &[false, false, true, true]).unwrap(), 1.0);
        assert_eq!(auroc(&[1.0; 5], &[false, true, false, true, true]).unwrap(), 0.5);
        assert_eq!(auroc(&[1.0, 3.0, 2.0], &[false, false, true]).unwrap(), 0.5);
        assert!(auroc(&[1.0, 2.0], &[false, false]).is_err());
        assert!(auroc(&[1.0], &[false, true]).is_err());
    }

    #[test]
    fn decisions() {
        assert_eq!(classify(0.9, 0.5), Decision::Id);
        assert_eq!(classify(0.5, 0.5), Decision::Id);
        assert_eq!(classify(0.1, 0.5), Decision::Ood);
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }
}
