//! Gradient-boosted regression trees on squared error.
//!
//! Splits are exact and greedy over midpoints between consecutive distinct
//! values, with `x ≤ threshold` going left. Rows are put into a canonical
//! order before fitting, so the model does not depend on input row order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GbtParams {
    pub rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
}

impl Default for GbtParams {
    fn default() -> Self {
        Self { rounds: 200, learning_rate: 0.05, max_depth: 4, min_samples_leaf: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Node {
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf { value: f64 },
}

/// Nodes in creation order; the root is node 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { value } => return *value,
                Node::Split { feature, threshold, left, right } => {
                    i = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(t: &Tree, i: usize) -> usize {
            match &t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(t, *left).max(walk(t, *right)),
            }
        }
        walk(self, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gbt {
    pub base_prediction: f64,
    pub learning_rate: f64,
    pub params: GbtParams,
    pub n_features: usize,
    pub trees: Vec<Tree>,
}

/// Gains at or below this are rounding noise, not structure.
const GAIN_FLOOR: f64 = 1e-20;

#[derive(Clone, Copy)]
struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

struct Fitter<'a> {
    x: &'a [Vec<f64>],
    /// Row indices sorted by each feature (ties by canonical row index).
    sorted: Vec<Vec<usize>>,
    params: &'a GbtParams,
    exec: Exec,
}

impl Fitter<'_> {
    fn best_split_on(&self, f: usize, member: &[bool], resid: &[f64], n: usize, mean: f64) -> Option<Candidate> {
        let min_leaf = self.params.min_samples_leaf.max(1);
        let total: f64 = self.sorted[f].iter().filter(|&&i| member[i]).map(|&i| resid[i] - mean).sum();
        let mut best: Option<Candidate> = None;
        let (mut n_left, mut s_left) = (0usize, 0.0);
        let mut prev: Option<usize> = None;
        for &i in self.sorted[f].iter().filter(|&&i| member[i]) {
            if let Some(p) = prev {
                let (a, b) = (self.x[p][f], self.x[i][f]);
                if a < b && n_left >= min_leaf && n - n_left >= min_leaf {
                    let n_right = n - n_left;
                    let ml = s_left / n_left as f64;
                    let mr = (total - s_left) / n_right as f64;
                    let gain = (n_left * n_right) as f64 / n as f64 * (ml - mr) * (ml - mr);
                    if gain > GAIN_FLOOR && best.is_none_or(|c| gain > c.gain) {
                        let mid = a + (b - a) / 2.0;
                        // adjacent floats: the midpoint may round up onto b
                        let threshold = if mid < b { mid } else { a };
                        best = Some(Candidate { gain, feature: f, threshold });
                    }
                }
            }
            n_left += 1;
            s_left += resid[i] - mean;
            prev = Some(i);
        }
        best
    }

    fn best_split(&self, rows: &[usize], resid: &[f64]) -> Option<Candidate> {
        let mut member = vec![false; self.x.len()];
        rows.iter().for_each(|&i| member[i] = true);
        let mean = rows.iter().map(|&i| resid[i]).sum::<f64>() / rows.len() as f64;
        let per_feature =
            self.exec.map_range(self.sorted.len(), |f| self.best_split_on(f, &member, resid, rows.len(), mean));
        // lowest feature wins ties; within a feature the lowest threshold already won
        per_feature.into_iter().flatten().fold(None, |acc: Option<Candidate>, c| match acc {
            Some(a) if a.gain >= c.gain => Some(a),
            _ => Some(c),
        })
    }

    fn grow(&self, rows: Vec<usize>, resid: &[f64], depth: usize, tree: &mut Tree) -> usize {
        let id = tree.nodes.len();
        let mean = rows.iter().map(|&i| resid[i]).sum::<f64>() / rows.len() as f64;
        tree.nodes.push(Node::Leaf { value: mean });
        if depth >= self.params.max_depth || rows.len() < 2 * self.params.min_samples_leaf.max(1) {
            return id;
        }
        let Some(c) = self.best_split(&rows, resid) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| self.x[i][c.feature] <= c.threshold);
        let left = self.grow(l, resid, depth + 1, tree);
        let right = self.grow(r, resid, depth + 1, tree);
        tree.nodes[id] = Node::Split { feature: c.feature, threshold: c.threshold, left, right };
        id
    }
}

fn canonical_order(x: &[Vec<f64>], y: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| {
        x[a].iter()
            .zip(&x[b])
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(y[a].total_cmp(&y[b]))
    });
    order
}

impl Gbt {
    /// Fits and also returns the training mean squared error after each round
    /// (index 0 is the base prediction alone).
    pub fn fit_with_history(x: &[Vec<f64>], y: &[f64], params: &GbtParams, exec: Exec) -> Result<(Self, Vec<f64>)> {
        if x.len() < 2 || x.len() != y.len() {
            return Err(Error::invalid(format!(
                "boosting needs ≥ 2 rows with one target each, got {} rows and {} targets",
                x.len(),
                y.len()
            )));
        }
        let d = x[0].len();
        if x.iter().any(|r| r.len() != d) || x.iter().flatten().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::invalid("boosting input must be finite and rectangular"));
        }
        if !(params.learning_rate > 0.0 && params.learning_rate <= 1.0) {
            return Err(Error::invalid("learning rate must be in (0, 1]"));
        }
        let order = canonical_order(x, y);
        let x: Vec<Vec<f64>> = order.iter().map(|&i| x[i].clone()).collect();
        let y: Vec<f64> = order.iter().map(|&i| y[i]).collect();
        let n = x.len();
        let sorted = (0..d)
            .map(|f| {
                let mut idx: Vec<usize> = (0..n).collect();
                idx.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
                idx
            })
            .collect();
        let fitter = Fitter { x: &x, sorted, params, exec };
        let base = y.iter().sum::<f64>() / n as f64;
        let mut pred = vec![base; n];
        let mse = |pred: &[f64]| pred.iter().zip(&y).map(|(p, t)| (t - p) * (t - p)).sum::<f64>() / n as f64;
        let mut history = vec![mse(&pred)];
        let mut trees = Vec::with_capacity(params.rounds);
        for _ in 0..params.rounds {
            let resid: Vec<f64> = y.iter().zip(&pred).map(|(t, p)| t - p).collect();
            let mut tree = Tree { nodes: Vec::new() };
            fitter.grow((0..n).collect(), &resid, 0, &mut tree);
            for (p, xi) in pred.iter_mut().zip(&x) {
                *p += params.learning_rate * tree.predict(xi);
            }
            history.push(mse(&pred));
            trees.push(tree);
        }
        Ok((
            Self {
                base_prediction: base,
                learning_rate: params.learning_rate,
                params: params.clone(),
                n_features: d,
                trees,
            },
            history,
        ))
    }

    pub fn fit(x: &[Vec<f64>], y: &[f64], params: &GbtParams) -> Result<Self> {
        Ok(Self::fit_with_history(x, y, params, Exec::Sequential)?.0)
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(Error::SchemaMismatch(format!(
                "predictor expects {} inputs, got {}",
                self.n_features,
                x.len()
            )));
        }
        let s: f64 = self.trees.iter().map(|t| t.predict(x)).sum();
        Ok(self.base_prediction + self.learning_rate * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn step_data(n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        let x: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 / (n - 1) as f64 * 2.0 - 1.0 + 0.001]).collect();
        let y = x.iter().map(|r| if r[0] > 0.0 { 1.0 } else { 0.0 }).collect();
        (x, y)
    }

    #[test]
    fn constant_target() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let m = Gbt::fit(&x, &[0.7; 10], &GbtParams::default()).unwrap();
        for r in &x {
            assert!((m.predict(r).unwrap() - 0.7).abs() < 1e-15);
        }
        assert!(m.trees.iter().all(|t| t.nodes.len() == 1));
    }

    #[test]
    fn step_function_fits() {
        let (x, y) = step_data(100);
        let m = Gbt::fit(&x, &y, &GbtParams::default()).unwrap();
        let rmse = (x.iter().zip(&y).map(|(r, t)| (m.predict(r).unwrap() - t).powi(2)).sum::<f64>() / 100.0).sqrt();
        assert!(rmse <= 1e-3, "rmse {rmse}");
    }

    #[test]
    fn no_trees_gives_base() {
        let (x, y) = step_data(10);
        let m = Gbt::fit(&x, &y, &GbtParams { rounds: 0, ..GbtParams::default() }).unwrap();
        assert_eq!(m.predict(&[0.3]).unwrap(), m.base_prediction);
        assert!(m.predict(&[0.3, 1.0]).is_err());
    }

    #[test]
    fn split_tie_break_lowest_feature_then_threshold() {
        // both features separate identically; feature 0 must win
        let x = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]];
        let y = [0.0, 0.0, 1.0, 1.0];
        let p = GbtParams { rounds: 1, learning_rate: 1.0, max_depth: 1, min_samples_leaf: 1 };
        let m = Gbt::fit(&x, &y, &p).unwrap();
        assert_eq!(m.trees[0].nodes[0], Node::Split { feature: 0, threshold: 1.5, left: 1, right: 2 });
        // symmetric targets: thresholds 0.5 and 2.5 tie, lowest wins
        let y = [1.0, 0.0, 0.0, 1.0];
        let m = Gbt::fit(&x[..].iter().map(|r| vec![r[0]]).collect::<Vec<_>>(), &y, &p).unwrap();
        assert!(matches!(m.trees[0].nodes[0], Node::Split { threshold, .. } if threshold == 0.5));
    }

    #[test]
    fn depth_and_leaf_limits() {
        let mut rng = SplitMix64::new(1);
        let x: Vec<Vec<f64>> = (0..60).map(|_| (0..3).map(|_| rng.normal(0.0, 1.0)).collect()).collect();
        let y: Vec<f64> = x.iter().map(|r| r[0].sin() + r[1] * r[2]).collect();
        let p = GbtParams { rounds: 20, max_depth: 3, ..GbtParams::default() };
        let m = Gbt::fit(&x, &y, &p).unwrap();
        for t in &m.trees {
            assert!(t.depth() <= 3);
            for node in &t.nodes {
                if let Node::Split { feature, .. } = node {
                    assert!(*feature < 3);
                }
            }
        }
    }

    #[test]
    fn permutation_invariant() {
        let mut rng = SplitMix64::new(2);
        let x: Vec<Vec<f64>> = (0..40).map(|_| (0..2).map(|_| rng.below(5) as f64).collect()).collect();
        let y: Vec<f64> = (0..40).map(|_| rng.next_f64()).collect();
        let p = GbtParams { rounds: 15, ..GbtParams::default() };
        let a = Gbt::fit(&x, &y, &p).unwrap();
        let mut idx: Vec<usize> = (0..40).collect();
        idx.reverse();
        idx.swap(3, 17);
        let xs: Vec<_> = idx.iter().map(|&i| x[i].clone()).collect();
        let ys: Vec<_> = idx.iter().map(|&i| y[i]).collect();
        let b = Gbt::fit(&xs, &ys, &p).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn parallel_split_search_matches() {
        let mut rng = SplitMix64::new(3);
        let x: Vec<Vec<f64>> = (0..50).map(|_| (0..6).map(|_| rng.normal(0.0, 1.0)).collect()).collect();
        let y: Vec<f64> = x.iter().map(|r| r[2] - r[4]).collect();
        let p = GbtParams { rounds: 10, ..GbtParams::default() };
        let (a, _) = Gbt::fit_with_history(&x, &y, &p, Exec::Sequential).unwrap();
        let (b, _) = Gbt::fit_with_history(&x, &y, &p, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
