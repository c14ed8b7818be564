use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::{check_labels, ClassifyError, FeatureMatrix};
use crate::ingest::WordPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BaselineKind {
    LogisticRegression,
    Knn,
    DecisionTree,
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaselineKind::LogisticRegression => "logistic_regression",
            BaselineKind::Knn => "knn",
            BaselineKind::DecisionTree => "decision_tree",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BaselineHyper {
    pub learning_rate: f64,
    pub steps: u32,
    pub l2: f64,
    pub k: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for BaselineHyper {
    fn default() -> Self {
        BaselineHyper { learning_rate: 0.1, steps: 500, l2: 1e-3, k: 5, max_depth: 4, min_leaf: 2 }
    }
}

/// Per-feature z-scoring fitted on training rows. Constant columns get unit
/// scale.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &FeatureMatrix) -> Self {
        let (nf, n) = (x.num_features(), x.num_days() as f64);
        let mut mean = vec![0.0; nf];
        for row in x.rows() {
            for (m, &v) in mean.iter_mut().zip(row) {
                *m += f64::from(v);
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; nf];
        for row in x.rows() {
            for ((s, &v), m) in var.iter_mut().zip(row).zip(&mean) {
                let d = f64::from(v) - m;
                *s += d * d;
            }
        }
        let scale = var.into_iter().map(|s| libm::sqrt(s / n)).map(|s| if s > 0.0 { s } else { 1.0 }).collect();
        Standardizer { mean, scale }
    }

    pub fn apply_into(&self, x: &[u32], out: &mut Vec<f64>) {
        out.clear();
        out.extend(x.iter().zip(&self.mean).zip(&self.scale).map(|((&v, m), s)| (f64::from(v) - m) / s));
    }

    pub fn apply(&self, x: &[u32]) -> Vec<f64> {
        let mut out = Vec::with_capacity(x.len());
        self.apply_into(x, &mut out);
        out
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + libm::log1p(libm::exp(-z))
    } else {
        libm::log1p(libm::exp(z))
    }
}

/// Mean log-loss plus `l2/2 · ‖w‖²` and its gradient. `params` holds the
/// weights followed by the bias; rows of `x` are already standardized.
pub fn logistic_loss_and_gradient(params: &[f64], x: &[Vec<f64>], y: &[bool], l2: f64) -> (f64, Vec<f64>) {
    let nf = params.len() - 1;
    let n = x.len() as f64;
    let (w, b) = (&params[..nf], params[nf]);
    let mut loss = 0.0;
    let mut grad = vec![0.0; nf + 1];
    for (row, &label) in x.iter().zip(y) {
        let z = b + row.iter().zip(w).map(|(a, c)| a * c).sum::<f64>();
        let t = f64::from(u8::from(label));
        loss += softplus(z) - t * z;
        let r = sigmoid(z) - t;
        for (g, a) in grad.iter_mut().zip(row) {
            *g += r * a;
        }
        grad[nf] += r;
    }
    loss /= n;
    grad.iter_mut().for_each(|g| *g /= n);
    for (g, wi) in grad.iter_mut().zip(w) {
        *g += l2 * wi;
    }
    loss += 0.5 * l2 * w.iter().map(|v| v * v).sum::<f64>();
    (loss, grad)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogisticRegression {
    pub standardizer: Standardizer,
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LogisticRegression {
    fn fit(x: &FeatureMatrix, y: &[bool], hyper: &BaselineHyper) -> Result<Self, ClassifyError> {
        if !(hyper.learning_rate > 0.0) || hyper.l2 < 0.0 {
            return Err(ClassifyError::InvalidHyper("learning rate must be positive and l2 non-negative"));
        }
        let standardizer = Standardizer::fit(x);
        let rows: Vec<Vec<f64>> = x.rows().map(|r| standardizer.apply(r)).collect();
        let mut params = vec![0.0; x.num_features() + 1];
        for _ in 0..hyper.steps {
            let (_, grad) = logistic_loss_and_gradient(&params, &rows, y, hyper.l2);
            for (p, g) in params.iter_mut().zip(&grad) {
                *p -= hyper.learning_rate * g;
            }
        }
        let bias = params.pop().unwrap_or(0.0);
        Ok(LogisticRegression { standardizer, weights: params, bias })
    }

    fn predict(&self, x: &[u32]) -> f64 {
        let z = self.standardizer.apply(x).iter().zip(&self.weights).map(|(a, w)| a * w).sum::<f64>();
        sigmoid(z + self.bias)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Knn {
    pub k: usize,
    pub standardizer: Standardizer,
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<bool>,
}

impl Knn {
    fn fit(x: &FeatureMatrix, y: &[bool], hyper: &BaselineHyper) -> Result<Self, ClassifyError> {
        if hyper.k == 0 || hyper.k.is_multiple_of(2) {
            return Err(ClassifyError::InvalidHyper("k must be odd and at least 1"));
        }
        let standardizer = Standardizer::fit(x);
        let points = x.rows().map(|r| standardizer.apply(r)).collect();
        Ok(Knn { k: hyper.k, standardizer, points, labels: y.to_vec() })
    }

    /// Fraction of event days among the `k` nearest training days; distance
    /// ties resolve to the earlier training row.
    fn predict(&self, x: &[u32]) -> f64 {
        let q = self.standardizer.apply(x);
        let mut d: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), i))
            .collect();
        let k = self.k.min(d.len());
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < d.len() {
            d.select_nth_unstable_by(k - 1, cmp);
        }
        let votes = d[..k].iter().filter(|(_, i)| self.labels[*i]).count();
        votes as f64 / k as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "node", rename_all = "snake_case"))]
pub enum TreeNode {
    Leaf { event_rate: f64 },
    /// Rows with `x[feature] <= threshold` go left.
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecisionTree {
    /// Root at index 0.
    pub nodes: Vec<TreeNode>,
}

fn gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

impl DecisionTree {
    fn fit(x: &FeatureMatrix, y: &[bool], hyper: &BaselineHyper) -> Result<Self, ClassifyError> {
        if hyper.min_leaf == 0 {
            return Err(ClassifyError::InvalidHyper("min_leaf must be at least 1"));
        }
        let mut tree = DecisionTree { nodes: Vec::new() };
        let idx: Vec<usize> = (0..x.num_days()).collect();
        tree.grow(x, y, idx, 0, hyper);
        Ok(tree)
    }

    fn grow(&mut self, x: &FeatureMatrix, y: &[bool], idx: Vec<usize>, depth: usize, hyper: &BaselineHyper) -> usize {
        let id = self.nodes.len();
        let n = idx.len();
        let pos = idx.iter().filter(|&&i| y[i]).count();
        self.nodes.push(TreeNode::Leaf { event_rate: pos as f64 / n as f64 });
        if depth >= hyper.max_depth || pos == 0 || pos == n || n < 2 * hyper.min_leaf {
            return id;
        }
        let parent = gini(pos, n);
        let mut best: Option<(f64, usize, f64)> = None;
        let mut order: Vec<(u32, bool)> = Vec::with_capacity(n);
        for f in 0..x.num_features() {
            order.clear();
            order.extend(idx.iter().map(|&i| (x.row(i)[f], y[i])));
            order.sort_unstable_by_key(|&(v, _)| v);
            let mut left_pos = 0;
            for k in 1..n {
                left_pos += usize::from(order[k - 1].1);
                if order[k].0 == order[k - 1].0 || k < hyper.min_leaf || n - k < hyper.min_leaf {
                    continue;
                }
                let impurity = (k as f64 * gini(left_pos, k) + (n - k) as f64 * gini(pos - left_pos, n - k)) / n as f64;
                if impurity < parent - 1e-12 && best.is_none_or(|b| impurity < b.0) {
                    let threshold = (f64::from(order[k - 1].0) + f64::from(order[k].0)) / 2.0;
                    best = Some((impurity, f, threshold));
                }
            }
        }
        let Some((_, feature, threshold)) = best else { return id };
        let (l, r): (Vec<usize>, Vec<usize>) = idx.into_iter().partition(|&i| f64::from(x.row(i)[feature]) <= threshold);
        let left = self.grow(x, y, l, depth + 1, hyper);
        let right = self.grow(x, y, r, depth + 1, hyper);
        self.nodes[id] = TreeNode::Split { feature, threshold, left, right };
        id
    }

    /// Depth of the deepest leaf; a lone leaf has depth 0.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            match nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    fn predict(&self, x: &[u32]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Leaf { event_rate } => return event_rate,
                TreeNode::Split { feature, threshold, left, right } => {
                    i = if f64::from(x[feature]) <= threshold { left } else { right };
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum BaselineParams {
    LogisticRegression(LogisticRegression),
    Knn(Knn),
    DecisionTree(DecisionTree),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BaselineModel {
    pub features: Vec<WordPair>,
    pub params: BaselineParams,
}

impl BaselineModel {
    pub fn train(kind: BaselineKind, x: &FeatureMatrix, y: &[bool], hyper: &BaselineHyper) -> Result<Self, ClassifyError> {
        check_labels(x, y)?;
        let params = match kind {
            BaselineKind::LogisticRegression => BaselineParams::LogisticRegression(LogisticRegression::fit(x, y, hyper)?),
            BaselineKind::Knn => BaselineParams::Knn(Knn::fit(x, y, hyper)?),
            BaselineKind::DecisionTree => BaselineParams::DecisionTree(DecisionTree::fit(x, y, hyper)?),
        };
        Ok(BaselineModel { features: x.features.clone(), params })
    }

    pub fn kind(&self) -> BaselineKind {
        match self.params {
            BaselineParams::LogisticRegression(_) => BaselineKind::LogisticRegression,
            BaselineParams::Knn(_) => BaselineKind::Knn,
            BaselineParams::DecisionTree(_) => BaselineKind::DecisionTree,
        }
    }

    pub fn features(&self) -> &[WordPair] {
        &self.features
    }

    /// Event score in [0, 1].
    pub fn predict(&self, x: &[u32]) -> Result<f64, ClassifyError> {
        if x.len() != self.features.len() {
            return Err(ClassifyError::DimensionMismatch { expected: self.features.len(), got: x.len() });
        }
        Ok(match &self.params {
            BaselineParams::LogisticRegression(m) => m.predict(x),
            BaselineParams::Knn(m) => m.predict(x),
            BaselineParams::DecisionTree(m) => m.predict(x),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fm(nf: usize, rows: &[Vec<u32>]) -> FeatureMatrix {
        let feats = (0..nf).map(|i| WordPair::new(format!("a{i}"), format!("b{i}")).unwrap()).collect();
        let days = (0..rows.len() as u32).collect();
        FeatureMatrix::from_rows(feats, days, rows.concat()).unwrap()
    }

    fn separable() -> (FeatureMatrix, Vec<bool>) {
        let rows: Vec<Vec<u32>> = (0..20u32).map(|i| vec![i]).collect();
        let y: Vec<bool> = (0..20).map(|i| i >= 12).collect();
        (fm(1, &rows), y)
    }

    #[test]
    fn lr_separates_one_feature() {
        let (x, y) = separable();
        let m = BaselineModel::train(BaselineKind::LogisticRegression, &x, &y, &BaselineHyper::default()).unwrap();
        for (row, &label) in x.rows().zip(&y) {
            assert_eq!(m.predict(row).unwrap() >= 0.5, label);
        }
    }

    #[test]
    fn knn_one_returns_own_label() {
        let (x, y) = separable();
        let hyper = BaselineHyper { k: 1, ..BaselineHyper::default() };
        let m = BaselineModel::train(BaselineKind::Knn, &x, &y, &hyper).unwrap();
        for (row, &label) in x.rows().zip(&y) {
            assert_eq!(m.predict(row).unwrap(), f64::from(u8::from(label)));
        }
        let even = BaselineHyper { k: 4, ..BaselineHyper::default() };
        assert!(BaselineModel::train(BaselineKind::Knn, &x, &y, &even).is_err());
    }

    #[test]
    fn tree_splits_once_on_threshold_data() {
        let (x, y) = separable();
        let m = BaselineModel::train(BaselineKind::DecisionTree, &x, &y, &BaselineHyper::default()).unwrap();
        let BaselineParams::DecisionTree(t) = &m.params else { unreachable!() };
        assert_eq!(t.depth(), 1);
        match t.nodes[0] {
            TreeNode::Split { threshold, .. } => assert_eq!(threshold, 11.5),
            _ => panic!("root should split"),
        }
        for (row, &label) in x.rows().zip(&y) {
            assert_eq!(m.predict(row).unwrap(), f64::from(u8::from(label)));
        }
    }

    #[test]
    fn tree_respects_depth_and_leaf_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rows: Vec<Vec<u32>> = (0..200).map(|_| (0..4).map(|_| rng.random_range(0..10)).collect()).collect();
        let y: Vec<bool> = (0..200).map(|_| rng.random_bool(0.4)).collect();
        let hyper = BaselineHyper { max_depth: 3, ..BaselineHyper::default() };
        let m = BaselineModel::train(BaselineKind::DecisionTree, &fm(4, &rows), &y, &hyper).unwrap();
        let BaselineParams::DecisionTree(t) = &m.params else { unreachable!() };
        assert!(t.depth() <= 3);
    }

    #[test]
    fn baseline_scores_in_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rows: Vec<Vec<u32>> = (0..60).map(|_| (0..3).map(|_| rng.random_range(0..20)).collect()).collect();
        let y: Vec<bool> = (0..60).map(|i| i % 3 == 0).collect();
        let x = fm(3, &rows);
        for kind in [BaselineKind::LogisticRegression, BaselineKind::Knn, BaselineKind::DecisionTree] {
            let m = BaselineModel::train(kind, &x, &y, &BaselineHyper::default()).unwrap();
            assert_eq!(m.kind(), kind);
            for row in x.rows() {
                let s = m.predict(row).unwrap();
                assert!((0.0..=1.0).contains(&s), "{kind} {s}");
            }
            assert!(m.predict(&[1]).is_err());
        }
    }

    #[test]
    fn lr_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let x: Vec<Vec<f64>> = (0..40).map(|_| (0..3).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let y: Vec<bool> = (0..40).map(|_| rng.random_bool(0.5)).collect();
        for _ in 0..20 {
            let p: Vec<f64> = (0..4).map(|_| rng.random_range(-1.5..1.5)).collect();
            let (_, g) = logistic_loss_and_gradient(&p, &x, &y, 1e-3);
            for j in 0..4 {
                let h = 1e-6;
                let (mut up, mut dn) = (p.clone(), p.clone());
                up[j] += h;
                dn[j] -= h;
                let fd = (logistic_loss_and_gradient(&up, &x, &y, 1e-3).0
                    - logistic_loss_and_gradient(&dn, &x, &y, 1e-3).0)
                    / (2.0 * h);
                assert!((fd - g[j]).abs() <= 1e-5 * g[j].abs().max(1e-3), "{fd} vs {}", g[j]);
            }
        }
    }

    proptest! {
        #[test]
        fn knn_duplicate_training_day_keeps_decisions(
            rows in proptest::collection::vec(proptest::collection::vec(0u32..6, 2), 4..30),
            dup in 0usize..30,
        ) {
            let y: Vec<bool> = (0..rows.len()).map(|i| i % 2 == 0).collect();
            let hyper = BaselineHyper { k: 1, ..BaselineHyper::default() };
            let base = BaselineModel::train(BaselineKind::Knn, &fm(2, &rows), &y, &hyper).unwrap();
            let d = dup % rows.len();
            let mut rows2 = rows.clone();
            rows2.push(rows[d].clone());
            let mut y2 = y.clone();
            y2.push(y[d]);
            // duplicate keeps the same standardization up to the added copy, so
            // compare only on points with no exact twin of opposite label
            let with_dup = BaselineModel::train(BaselineKind::Knn, &fm(2, &rows2), &y2, &hyper).unwrap();
            for (i, r) in rows.iter().enumerate() {
                let twin = rows.iter().enumerate().any(|(j, s)| j != i && s == r);
                if !twin {
                    prop_assert_eq!(base.predict(r).unwrap(), with_dup.predict(r).unwrap());
                }
            }
        }
    }
}
