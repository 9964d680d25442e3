//! Bagged gini decision trees. Each tree draws from its own ChaCha stream
//! derived from the ensemble seed, so trees can be grown in parallel without
//! changing the result.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Features examined per split; `None` means the square root of the
    /// dimension, rounded up.
    pub max_features: Option<usize>,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub bootstrap: bool,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            max_features: None,
            max_depth: None,
            min_samples_leaf: 1,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Leaf {
        positive: bool,
    },
    Split {
        feature: usize,
        threshold: f64,
        /// Index of the child taken when `x[feature] <= threshold`.
        left: usize,
        right: usize,
    },
}

/// Nodes in an arena; the root is node 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn leaf(positive: bool) -> Self {
        DecisionTree {
            nodes: vec![Node::Leaf { positive }],
        }
    }

    pub fn vote(&self, x: &[f64]) -> bool {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { positive } => return *positive,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeEnsemble {
    pub trees: Vec<DecisionTree>,
}

impl TreeEnsemble {
    pub fn from_trees(trees: Vec<DecisionTree>) -> Self {
        TreeEnsemble { trees }
    }

    pub fn positive_votes(&self, x: &[f64]) -> usize {
        self.trees.iter().filter(|t| t.vote(x)).count()
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        if self.trees.is_empty() {
            return 0.0;
        }
        self.positive_votes(x) as f64 / self.trees.len() as f64
    }

    pub fn fit(xs: &[Vec<f64>], ys: &[bool], config: &ForestConfig, seed: u64) -> TreeEnsemble {
        let trees = (0..config.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t as u64);
                let n = xs.len();
                let rows: Vec<usize> = if config.bootstrap {
                    (0..n).map(|_| rng.gen_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                grow(xs, ys, rows, config, &mut rng)
            })
            .collect();
        TreeEnsemble { trees }
    }
}

fn gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

fn best_split(
    xs: &[Vec<f64>],
    ys: &[bool],
    rows: &[usize],
    features: &[usize],
    min_leaf: usize,
) -> Option<BestSplit> {
    let n = rows.len();
    let total_pos = rows.iter().filter(|&&r| ys[r]).count();
    let mut best: Option<BestSplit> = None;
    let mut sorted = rows.to_vec();
    for &f in features {
        sorted.sort_by(|&a, &b| xs[a][f].total_cmp(&xs[b][f]));
        let mut left_pos = 0;
        for k in 1..n {
            if ys[sorted[k - 1]] {
                left_pos += 1;
            }
            let (lo, hi) = (xs[sorted[k - 1]][f], xs[sorted[k]][f]);
            if lo == hi || k < min_leaf || n - k < min_leaf {
                continue;
            }
            let impurity = (k as f64 * gini(left_pos, k)
                + (n - k) as f64 * gini(total_pos - left_pos, n - k))
                / n as f64;
            if best.as_ref().map_or(true, |b| impurity < b.impurity) {
                best = Some(BestSplit {
                    feature: f,
                    threshold: lo + (hi - lo) / 2.0,
                    impurity,
                });
            }
        }
    }
    best
}

fn grow(xs: &[Vec<f64>], ys: &[bool], rows: Vec<usize>, config: &ForestConfig, rng: &mut ChaCha8Rng) -> DecisionTree {
    let d = xs[0].len();
    let mtry = config
        .max_features
        .unwrap_or_else(|| (d as f64).sqrt().ceil() as usize)
        .clamp(1, d);
    let mut nodes = vec![Node::Leaf { positive: false }];
    let mut stack = vec![(0usize, rows, 0usize)];
    while let Some((id, rows, depth)) = stack.pop() {
        let pos = rows.iter().filter(|&&r| ys[r]).count();
        // ties in the majority vote go to the negative class
        let leaf = Node::Leaf {
            positive: 2 * pos > rows.len(),
        };
        let pure = pos == 0 || pos == rows.len();
        if pure || config.max_depth.is_some_and(|m| depth >= m) || rows.len() < 2 * config.min_samples_leaf {
            nodes[id] = leaf;
            continue;
        }
        let drawn: Vec<usize> = sample(rng, d, mtry).into_vec();
        let mut split = best_split(xs, ys, &rows, &drawn, config.min_samples_leaf);
        if split.is_none() {
            // every drawn feature is constant here; fall back to the rest
            let rest: Vec<usize> = (0..d).filter(|f| !drawn.contains(f)).collect();
            split = best_split(xs, ys, &rows, &rest, config.min_samples_leaf);
        }
        let Some(split) = split else {
            nodes[id] = leaf;
            continue;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| xs[i][split.feature] <= split.threshold);
        let left = nodes.len();
        let right = left + 1;
        nodes.push(Node::Leaf { positive: false });
        nodes.push(Node::Leaf { positive: false });
        nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        stack.push((right, r, depth + 1));
        stack.push((left, l, depth + 1));
    }
    DecisionTree { nodes }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vote_fraction_is_exact() {
        let trees = (0..100).map(|i| DecisionTree::leaf(i < 80)).collect();
        let e = TreeEnsemble::from_trees(trees);
        assert_eq!(e.predict_proba(&[0.0]), 0.8);
    }

    #[test]
    fn fits_xor_perfectly_without_bootstrap() {
        let xs = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        let ys = vec![false, true, true, false];
        let cfg = ForestConfig {
            n_trees: 5,
            bootstrap: false,
            max_features: Some(2),
            ..ForestConfig::default()
        };
        let e = TreeEnsemble::fit(&xs, &ys, &cfg, 1);
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(e.predict_proba(x), if *y { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn seeded_fit_is_reproducible() {
        let xs: Vec<Vec<f64>> = (0..60).map(|i| vec![(i % 7) as f64, (i % 5) as f64, i as f64 / 3.0]).collect();
        let ys: Vec<bool> = (0..60).map(|i| i % 7 > 3).collect();
        let cfg = ForestConfig {
            n_trees: 20,
            ..ForestConfig::default()
        };
        assert_eq!(TreeEnsemble::fit(&xs, &ys, &cfg, 9), TreeEnsemble::fit(&xs, &ys, &cfg, 9));
    }

    #[test]
    fn depth_limit() {
        let xs: Vec<Vec<f64>> = (0..16).map(|i| vec![i as f64]).collect();
        let ys: Vec<bool> = (0..16).map(|i| i % 2 == 0).collect();
        let cfg = ForestConfig {
            n_trees: 1,
            max_depth: Some(2),
            bootstrap: false,
            ..ForestConfig::default()
        };
        assert!(TreeEnsemble::fit(&xs, &ys, &cfg, 0).trees[0].depth() <= 2);
    }
}
