//! Random forest: bootstrapped trees split on Gini impurity over a random
//! candidate-feature subset per split, grown to purity (or the minimum leaf
//! size), with plurality voting at prediction time.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::Matrix;
use crate::seed::derive_seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestHyper {
    pub trees: usize,
    pub min_leaf: usize,
}

impl Default for ForestHyper {
    fn default() -> Self {
        ForestHyper {
            trees: 100,
            min_leaf: 1,
        }
    }
}

impl ForestHyper {
    pub(crate) fn validate(&self) -> Result<()> {
        use crate::error::Error;
        if self.trees == 0 {
            return Err(Error::InvalidArgument("forest needs at least 1 tree".into()));
        }
        if self.min_leaf == 0 {
            return Err(Error::InvalidArgument("forest min_leaf must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        class: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { class } => return *class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    pub n_classes: usize,
}

impl ForestModel {
    /// Plurality over trees; vote ties go to the lowest class index.
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut votes = vec![0usize; self.n_classes];
        for tree in &self.trees {
            votes[tree.predict(x)] += 1;
        }
        let mut best = 0;
        for (c, &v) in votes.iter().enumerate().skip(1) {
            if v > votes[best] {
                best = c;
            }
        }
        best
    }
}

pub(crate) fn fit(
    hyper: &ForestHyper,
    seed: u64,
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
) -> ForestModel {
    use rayon::prelude::*;

    // per-tree seeds are fixed up front so parallel training cannot change
    // results
    let tree_seeds: Vec<u64> = (0..hyper.trees).map(|t| derive_seed(seed, t as u64)).collect();
    let candidates = ((x.n_cols() as f64).sqrt().ceil() as usize).clamp(1, x.n_cols());

    let trees = tree_seeds
        .into_par_iter()
        .map(|tree_seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(tree_seed);
            let n = x.n_rows();
            let bootstrap: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            grow_tree(x, y, n_classes, hyper.min_leaf, candidates, bootstrap, &mut rng)
        })
        .collect();

    ForestModel { trees, n_classes }
}

fn gini(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts
        .iter()
        .map(|&c| {
            let p = c as f64 / t;
            p * p
        })
        .sum::<f64>()
}

fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (c, &v) in counts.iter().enumerate().skip(1) {
        if v > counts[best] {
            best = c;
        }
    }
    best
}

fn grow_tree(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    min_leaf: usize,
    candidates: usize,
    root_indices: Vec<usize>,
    rng: &mut ChaCha8Rng,
) -> Tree {
    let mut nodes = vec![Node::Leaf { class: 0 }];
    let mut work = vec![(0usize, root_indices)];

    while let Some((slot, indices)) = work.pop() {
        let mut counts = vec![0usize; n_classes];
        for &i in &indices {
            counts[y[i]] += 1;
        }
        let total = indices.len();
        let parent_gini = gini(&counts, total);

        let pure = counts.iter().any(|&c| c == total);
        if pure || total < 2 * min_leaf || total < 2 {
            nodes[slot] = Node::Leaf {
                class: majority(&counts),
            };
            continue;
        }

        let mut best: Option<(usize, f64, f64)> = None; // (feature, threshold, weighted gini)
        let features = rand::seq::index::sample(rng, x.n_cols(), candidates);
        let mut sorted = indices.clone();
        for feature in features {
            sorted.sort_by(|&a, &b| x.get(a, feature).total_cmp(&x.get(b, feature)));
            let mut left_counts = vec![0usize; n_classes];
            for (k, &i) in sorted.iter().enumerate().take(total - 1) {
                left_counts[y[i]] += 1;
                let n_left = k + 1;
                let n_right = total - n_left;
                if n_left < min_leaf || n_right < min_leaf {
                    continue;
                }
                let here = x.get(i, feature);
                let next = x.get(sorted[k + 1], feature);
                if here == next {
                    continue; // no boundary between equal values
                }
                let right_counts: Vec<usize> = counts
                    .iter()
                    .zip(&left_counts)
                    .map(|(&c, &l)| c - l)
                    .collect();
                let weighted = (n_left as f64 * gini(&left_counts, n_left)
                    + n_right as f64 * gini(&right_counts, n_right))
                    / total as f64;
                if best.map_or(true, |(_, _, w)| weighted < w) {
                    best = Some((feature, 0.5 * (here + next), weighted));
                }
            }
        }

        match best {
            Some((feature, threshold, weighted)) if parent_gini - weighted > 1e-12 => {
                let (mut left, mut right) = (Vec::new(), Vec::new());
                for &i in &indices {
                    if x.get(i, feature) <= threshold {
                        left.push(i);
                    } else {
                        right.push(i);
                    }
                }
                let left_slot = nodes.len();
                nodes.push(Node::Leaf { class: 0 });
                let right_slot = nodes.len();
                nodes.push(Node::Leaf { class: 0 });
                nodes[slot] = Node::Split {
                    feature,
                    threshold,
                    left: left_slot,
                    right: right_slot,
                };
                work.push((left_slot, left));
                work.push((right_slot, right));
            }
            _ => {
                // no impurity-reducing split among the candidates
                nodes[slot] = Node::Leaf {
                    class: majority(&counts),
                };
            }
        }
    }

    Tree { nodes }
}
