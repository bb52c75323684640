//! The cophenetic pseudo-metric on a merge tree.
//!
//! `d_p(a, b) = κ_p(merge(a, b)) − min(κ_p(a), κ_p(b))` where the merge point
//! is the lowest common ancestor. Queries are answered in O(log n) after a
//! binary-lifting preprocessing pass.

use ndarray::{Array1, Array2};

use super::MergeTree;
use crate::{Error, Result};

/// Dense-matrix cap for [`functional_tree`].
pub const NODE_CAP: usize = 10_000;

/// Preprocessed ancestor structure for merge-height queries.
#[derive(Debug)]
pub struct TreeMetricView<'a> {
    pub tree: &'a MergeTree,
    depth: Vec<usize>,
    // up[k][v] = 2^k-th ancestor of v (root maps to itself).
    up: Vec<Vec<usize>>,
}

impl<'a> TreeMetricView<'a> {
    pub fn new(tree: &'a MergeTree) -> Self {
        let n = tree.nodes.len();
        let mut depth = vec![0usize; n];
        let children = tree.children();
        let mut order = vec![tree.root];
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &c in &children[v] {
                depth[c] = depth[v] + 1;
                order.push(c);
            }
        }
        let levels = (usize::BITS - n.leading_zeros()).max(1) as usize;
        let mut up = vec![vec![0usize; n]; levels];
        for v in 0..n {
            up[0][v] = tree.nodes[v].parent.unwrap_or(v);
        }
        for k in 1..levels {
            for v in 0..n {
                up[k][v] = up[k - 1][up[k - 1][v]];
            }
        }
        TreeMetricView { tree, depth, up }
    }

    /// Lowest common ancestor of two nodes.
    pub fn lca(&self, mut a: usize, mut b: usize) -> usize {
        if self.depth[a] < self.depth[b] {
            std::mem::swap(&mut a, &mut b);
        }
        let mut gap = self.depth[a] - self.depth[b];
        let mut k = 0;
        while gap > 0 {
            if gap & 1 == 1 {
                a = self.up[k][a];
            }
            gap >>= 1;
            k += 1;
        }
        if a == b {
            return a;
        }
        for k in (0..self.up.len()).rev() {
            if self.up[k][a] != self.up[k][b] {
                a = self.up[k][a];
                b = self.up[k][b];
            }
        }
        self.up[0][a]
    }

    /// Height of the lowest merge point of two nodes.
    pub fn merge_height(&self, a: usize, b: usize) -> f64 {
        self.tree.nodes[self.lca(a, b)].height
    }

    /// The cophenetic distance between two nodes.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let ha = self.tree.nodes[a].height;
        let hb = self.tree.nodes[b].height;
        self.merge_height(a, b) - ha.min(hb)
    }
}

/// Cophenetic distance between two nodes of a tree (convenience wrapper; build
/// a [`TreeMetricView`] once for repeated queries).
pub fn tree_distance(view: &TreeMetricView<'_>, a: usize, b: usize) -> f64 {
    view.distance(a, b)
}

/// A merge tree materialized as a functional metric-measure space
/// `(T_p, d_p, ω_p, κ_p)` with a dense distance matrix, ready for transport.
#[derive(Debug, Clone)]
pub struct FunctionalTree {
    pub p: f64,
    pub dist: Array2<f64>,
    pub mass: Array1<f64>,
    pub heights: Array1<f64>,
}

/// Materialize the full d_p matrix, masses and heights of a tree.
pub fn functional_tree(tree: &MergeTree) -> Result<FunctionalTree> {
    let n = tree.nodes.len();
    if n > NODE_CAP {
        return Err(Error::TreeTooLarge {
            got: n,
            cap: NODE_CAP,
        });
    }
    let view = TreeMetricView::new(tree);
    let mut dist = Array2::zeros((n, n));
    for a in 0..n {
        for b in (a + 1)..n {
            let d = view.distance(a, b);
            dist[[a, b]] = d;
            dist[[b, a]] = d;
        }
    }
    let mass = Array1::from_iter(tree.nodes.iter().map(|nd| nd.mass));
    let heights = Array1::from_iter(tree.nodes.iter().map(|nd| nd.height));
    Ok(FunctionalTree {
        p: tree.p,
        dist,
        mass,
        heights,
    })
}
