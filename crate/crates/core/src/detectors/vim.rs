//! Virtual-logit matching: energy penalized by the feature residual outside
//! the principal subspace of the train features.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::logits::{logsumexp, maxlogit_score};
use crate::data_model::FeatureExport;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct VimModel {
    /// Origin of the feature space.
    pub u: DVector<f64>,
    /// `D×d` orthonormal principal basis.
    pub basis: DMatrix<f64>,
    pub alpha: f64,
}

/// Top-`d` eigenvectors of a symmetric matrix, largest eigenvalue first
/// (equal eigenvalues keep solver order).
pub(crate) fn top_eigenvectors(m: DMatrix<f64>, d: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m, 1e-10, 0)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order[..d].iter().map(|&k| eig.eigenvalues[k]).collect();
    let basis = DMatrix::from_fn(n, d, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, basis))
}

impl VimModel {
    pub fn fit(train: &FeatureExport, dim: Option<usize>) -> Result<Self> {
        let (n, d_full) = (train.n_samples(), train.feature_dim());
        let d = dim.unwrap_or((d_full / 2).max(1));
        if d == 0 || d >= d_full {
            return Err(Error::invalid(format!("ViM subspace dimension {d} must be in [1, D) with D={d_full}")));
        }
        let u = match &train.head {
            Some(h) => {
                let pinv = h.weight.clone().pseudo_inverse(1e-10).map_err(|e| Error::Numerical(e.to_string()))?;
                -(pinv * &h.bias)
            }
            None => train.features.row_mean().transpose(),
        };
        let mut centered = train.features.clone();
        for i in 0..n {
            let r = centered.row(i).transpose() - &u;
            centered.set_row(i, &r.transpose());
        }
        let cov = centered.transpose() * &centered / n as f64;
        let (_, basis) = top_eigenvectors(cov, d)?;
        let mut model = Self { u, basis, alpha: 0.0 };
        let mean_residual = (0..n).map(|i| model.residual(&train.feature_row(i))).sum::<f64>() / n as f64;
        let mean_maxlogit = (0..n).map(|i| maxlogit_score(&train.logit_row(i))).sum::<Result<f64>>()? / n as f64;
        model.alpha = if mean_residual == 0.0 { 0.0 } else { mean_maxlogit / mean_residual };
        Ok(model)
    }

    /// Norm of the component of `z − u` orthogonal to the principal basis.
    pub fn residual(&self, z: &DVector<f64>) -> f64 {
        let x = z - &self.u;
        let proj = &self.basis * (self.basis.transpose() * &x);
        (x - proj).norm()
    }

    pub fn score(&self, z: &DVector<f64>, logits: &[f64]) -> f64 {
        logsumexp(logits) - self.alpha * self.residual(z)
    }
}
