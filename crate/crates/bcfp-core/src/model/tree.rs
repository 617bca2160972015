//! CART-style binary decision tree with Gini impurity.

use serde::{Deserialize, Serialize};

use crate::featurize::FeatureMatrix;
use crate::model::ForestParams;
use crate::pcg::Pcg32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Internal {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        positive_fraction: f64,
        samples: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    pub root: usize,
}

impl DecisionTree {
    /// Positive fraction of the leaf reached by a feature row.
    pub fn predict_row(&self, features: &[u32]) -> f64 {
        let mut idx = self.root;
        loop {
            match self.nodes[idx] {
                Node::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if (features[feature] as f64) <= threshold {
                        left
                    } else {
                        right
                    };
                }
                Node::Leaf {
                    positive_fraction, ..
                } => return positive_fraction,
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }
}

struct Grower<'a> {
    x: &'a FeatureMatrix,
    params: &'a ForestParams,
    n_candidates: usize,
    nodes: Vec<Node>,
}

/// Best split found for one node.
struct Split {
    feature: usize,
    threshold: f64,
    gain: f64,
}

pub(crate) fn grow(
    x: &FeatureMatrix,
    bootstrap: &[u32],
    params: &ForestParams,
    n_candidates: usize,
    rng: &mut Pcg32,
) -> DecisionTree {
    let mut grower = Grower {
        x,
        params,
        n_candidates,
        nodes: Vec::new(),
    };
    let mut rows = bootstrap.to_vec();
    let root = grower.grow_node(&mut rows, 0, rng);
    DecisionTree {
        nodes: grower.nodes,
        root,
    }
}

impl<'a> Grower<'a> {
    fn grow_node(&mut self, rows: &mut [u32], depth: usize, rng: &mut Pcg32) -> usize {
        let n = rows.len();
        let positives = rows
            .iter()
            .filter(|&&r| self.x.labels[r as usize] == 1)
            .count();

        let make_leaf = |nodes: &mut Vec<Node>| {
            nodes.push(Node::Leaf {
                positive_fraction: positives as f64 / n as f64,
                samples: n as u32,
            });
            nodes.len() - 1
        };

        let depth_exhausted = self.params.max_depth.is_some_and(|d| depth >= d);
        if positives == 0 || positives == n || n < self.params.min_samples_split || depth_exhausted
        {
            return make_leaf(&mut self.nodes);
        }

        let split = match self.best_split(rows, positives, rng) {
            Some(s) => s,
            None => return make_leaf(&mut self.nodes),
        };

        // partition the node's rows in place
        let mut left_end = 0;
        for i in 0..n {
            if (self.x.row(rows[i] as usize)[split.feature] as f64) <= split.threshold {
                rows.swap(i, left_end);
                left_end += 1;
            }
        }
        debug_assert!(left_end > 0 && left_end < n);

        let node_idx = self.nodes.len();
        self.nodes.push(Node::Leaf {
            positive_fraction: 0.0,
            samples: 0,
        }); // placeholder

        let (left_rows, right_rows) = rows.split_at_mut(left_end);
        let left = self.grow_node(left_rows, depth + 1, rng);
        let right = self.grow_node(right_rows, depth + 1, rng);
        self.nodes[node_idx] = Node::Internal {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        node_idx
    }

    /// Evaluate the Gini gain of every candidate feature over the node's
    /// rows. Returns the best positive-gain split; ties break toward the
    /// lower feature index, then the lower threshold.
    fn best_split(&self, rows: &[u32], positives: usize, rng: &mut Pcg32) -> Option<Split> {
        let n = rows.len();
        let n_f = n as f64;
        let parent_pos = positives as f64;
        // parent impurity scaled by n: n * (1 - p^2 - q^2)
        let parent_cost = {
            let p = parent_pos / n_f;
            n_f * (1.0 - p * p - (1.0 - p) * (1.0 - p))
        };

        let candidates = rng.sample_indices(self.x.n_cols, self.n_candidates);
        let min_leaf = self.params.min_samples_leaf;

        let mut best: Option<Split> = None;
        let mut values: Vec<(u32, u8)> = Vec::with_capacity(n);

        for &feature in &candidates {
            values.clear();
            values.extend(
                rows.iter()
                    .map(|&r| (self.x.row(r as usize)[feature], self.x.labels[r as usize])),
            );
            values.sort_unstable_by_key(|&(v, _)| v);
            if values[0].0 == values[n - 1].0 {
                continue; // constant feature in this node
            }

            let mut left_n = 0usize;
            let mut left_pos = 0usize;
            let mut i = 0;
            while i < n {
                let v = values[i].0;
                // consume the tie group
                while i < n && values[i].0 == v {
                    left_n += 1;
                    left_pos += (values[i].1 == 1) as usize;
                    i += 1;
                }
                if i == n {
                    break;
                }
                if left_n < min_leaf || n - left_n < min_leaf {
                    continue;
                }
                let right_n = n - left_n;
                let right_pos = positives - left_pos;
                let lp = left_pos as f64;
                let ln = left_n as f64;
                let rp = right_pos as f64;
                let rn = right_n as f64;
                // children impurity scaled by n: Σ side_n * gini_side
                let left_cost = ln * (1.0 - (lp / ln).powi(2) - (1.0 - lp / ln).powi(2));
                let right_cost = rn * (1.0 - (rp / rn).powi(2) - (1.0 - rp / rn).powi(2));
                let gain = (parent_cost - left_cost - right_cost) / n_f;
                if gain <= 1e-12 {
                    continue;
                }
                let threshold = (v as f64 + values[i].0 as f64) / 2.0;
                let better = match &best {
                    None => true,
                    Some(b) => {
                        gain > b.gain + 1e-15
                            || ((gain - b.gain).abs() <= 1e-15
                                && (feature, threshold) < (b.feature, b.threshold))
                    }
                };
                if better {
                    best = Some(Split {
                        feature,
                        threshold,
                        gain,
                    });
                }
            }
        }
        best
    }
}
