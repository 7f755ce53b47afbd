//! Class-conditional Gaussian detector with a shared covariance.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::data_model::FeatureExport;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MahalanobisModel {
    pub means: Vec<DVector<f64>>,
    pub precision: DMatrix<f64>,
}

impl MahalanobisModel {
    pub fn fit(train: &FeatureExport) -> Result<Self> {
        let labels =
            train.class_labels.as_ref().ok_or_else(|| Error::MissingLabels("Mahalanobis needs class labels".into()))?;
        let (n, d, c) = (train.n_samples(), train.feature_dim(), train.n_classes());
        let mut means = vec![DVector::zeros(d); c];
        let mut counts = vec![0usize; c];
        for (i, &y) in labels.iter().enumerate() {
            means[y] += train.features.row(i).transpose();
            counts[y] += 1;
        }
        if let Some(empty) = counts.iter().position(|&k| k == 0) {
            return Err(Error::invalid(format!("class {empty} has no training samples")));
        }
        for (m, &k) in means.iter_mut().zip(&counts) {
            *m /= k as f64;
        }
        let mut sigma = DMatrix::zeros(d, d);
        for (i, &y) in labels.iter().enumerate() {
            let r = train.features.row(i).transpose() - &means[y];
            sigma.ger(1.0, &r, &r, 1.0);
        }
        sigma /= n as f64;
        let eps = 1e-6 * sigma.trace() / d as f64;
        for k in 0..d {
            sigma[(k, k)] += eps;
        }
        let chol = Cholesky::new(sigma).ok_or_else(|| Error::Numerical("shared covariance is singular".into()))?;
        let p = chol.inverse();
        let precision = (&p + p.transpose()) * 0.5;
        Ok(Self { means, precision })
    }

    pub fn distance(&self, z: &DVector<f64>) -> f64 {
        self.means
            .iter()
            .map(|m| {
                let r = z - m;
                r.dot(&(&self.precision * &r))
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Negative minimum squared Mahalanobis distance to a class mean.
    pub fn score(&self, z: &DVector<f64>) -> f64 {
        -self.distance(z)
    }
}
