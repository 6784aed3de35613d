//! CART regression tree with squared-error impurity.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, invalid, Error, Result};

/// One training row: feature vector and target.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeRow {
    pub features: Vec<f64>,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        prediction: f64,
        count: usize,
    },
}

/// Arena-allocated binary tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    nodes: Vec<Node>,
    dim: usize,
}

/// A candidate split and its total child sum of squared deviations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitChoice {
    pub feature: usize,
    pub threshold: f64,
    pub sse: f64,
}

fn sum_sq_dev(targets: impl Iterator<Item = f64> + Clone) -> f64 {
    let (sum, n) = targets
        .clone()
        .fold((0.0, 0usize), |(s, n), t| (s + t, n + 1));
    if n == 0 {
        return 0.0;
    }
    let mean = sum / n as f64;
    targets.map(|t| (t - mean) * (t - mean)).sum()
}

/// Tolerance for treating two impurities as tied.
pub(crate) fn tie_eps(total: f64) -> f64 {
    1e-12 * total.max(1.0)
}

/// Best split of `idx` over all features, or `None` when no split with both
/// children holding `min_leaf` rows exists. Ties go to the lowest feature
/// index, then the lowest threshold.
pub fn best_split(rows: &[TreeRow], idx: &[usize], min_leaf: usize) -> Option<SplitChoice> {
    let dim = rows[idx[0]].features.len();
    let parent = sum_sq_dev(idx.iter().map(|&i| rows[i].target));
    let eps = tie_eps(parent);
    let mut best: Option<SplitChoice> = None;
    let mut order = idx.to_vec();
    for feature in 0..dim {
        order.sort_by(|&a, &b| rows[a].features[feature].total_cmp(&rows[b].features[feature]));
        for cut in 1..order.len() {
            let lo = rows[order[cut - 1]].features[feature];
            let hi = rows[order[cut]].features[feature];
            if lo == hi || cut < min_leaf || order.len() - cut < min_leaf {
                continue;
            }
            let sse = sum_sq_dev(order[..cut].iter().map(|&i| rows[i].target))
                + sum_sq_dev(order[cut..].iter().map(|&i| rows[i].target));
            let threshold = lo + (hi - lo) / 2.0;
            let better = match best {
                None => true,
                Some(b) => sse < b.sse - eps,
            };
            if better {
                best = Some(SplitChoice {
                    feature,
                    threshold,
                    sse,
                });
            }
        }
    }
    best
}

impl RegressionTree {
    pub fn fit(rows: &[TreeRow], max_depth: usize, min_leaf: usize) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Empty("tree rows"));
        }
        if min_leaf == 0 {
            return Err(invalid("min_leaf", "must be at least 1"));
        }
        let dim = rows[0].features.len();
        for row in rows {
            if row.features.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: row.features.len(),
                });
            }
            ensure_finite(&row.features, "tree features")?;
            ensure_finite(&[row.target], "tree target")?;
        }
        let mut tree = RegressionTree {
            nodes: Vec::new(),
            dim,
        };
        let idx: Vec<usize> = (0..rows.len()).collect();
        tree.grow(rows, idx, 0, max_depth, min_leaf);
        Ok(tree)
    }

    fn grow(
        &mut self,
        rows: &[TreeRow],
        idx: Vec<usize>,
        depth: usize,
        max_depth: usize,
        min_leaf: usize,
    ) -> usize {
        let id = self.nodes.len();
        let targets = idx.iter().map(|&i| rows[i].target);
        let impurity = sum_sq_dev(targets.clone());
        let leaf = Node::Leaf {
            prediction: targets.sum::<f64>() / idx.len() as f64,
            count: idx.len(),
        };
        self.nodes.push(leaf);

        if depth >= max_depth || idx.len() < 2 * min_leaf || impurity <= 0.0 {
            return id;
        }
        let Some(split) = best_split(rows, &idx, min_leaf) else {
            return id;
        };
        if split.sse >= impurity - tie_eps(impurity) {
            return id;
        }
        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| rows[i].features[split.feature] <= split.threshold);
        let left = self.grow(rows, left_idx, depth + 1, max_depth, min_leaf);
        let right = self.grow(rows, right_idx, depth + 1, max_depth, min_leaf);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }

    /// A tree that always predicts `value`.
    pub fn constant(value: f64, count: usize, dim: usize) -> Self {
        RegressionTree {
            nodes: vec![Node::Leaf {
                prediction: value,
                count,
            }],
            dim,
        }
    }

    pub fn predict(&self, features: &[f64]) -> Result<f64> {
        if features.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: features.len(),
            });
        }
        Ok(self.leaf_for(features).0)
    }

    /// Leaf prediction and node id reached by `features` (no dimension check).
    fn leaf_for(&self, features: &[f64]) -> (f64, usize) {
        let mut id = 0;
        loop {
            match self.nodes[id] {
                Node::Leaf { prediction, .. } => return (prediction, id),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    id = if features[feature] <= threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    /// Node id of the leaf `features` routes to.
    pub fn leaf_id(&self, features: &[f64]) -> usize {
        self.leaf_for(features).1
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], id: usize) -> usize {
            match nodes[id] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}
