//! Combinatorial barycentric merge trees.
//!
//! The tree is the quotient of a connected graph by the relation "equal field
//! value and same connected component of the sublevel subgraph": one node per
//! (value, component) class, swept bottom-up with a union-find. Equal-value
//! batches are processed atomically, so vertices whose values agree within
//! `BATCH_TOL` and which land in one component collapse to a single node.
//! Binning the field beforehand is the robust way to obtain compact trees;
//! `simplify` prunes low-persistence leaves afterwards.

mod metric;
mod newick;

pub use metric::{functional_tree, tree_distance, FunctionalTree, TreeMetricView, NODE_CAP};
pub use newick::to_newick;

use serde::{Deserialize, Serialize};

use crate::covergraph::{BinnedField, CoveringGraph};
use crate::{Error, Result};

/// Values within this tolerance are treated as equal during the sweep.
/// Exact equality (as produced by binning) always groups.
pub const BATCH_TOL: f64 = 1e-12;

/// One equivalence class of the quotient: a connected component of a sublevel
/// set at its birth value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MergeNode {
    pub id: usize,
    /// Field value of the class (κ_p).
    pub height: f64,
    /// Pushforward mass of the member vertices (ω_p).
    pub mass: f64,
    /// Parent node, `None` at the root.
    pub parent: Option<usize>,
    /// Graph vertices whose class this node is (the fiber of α_p).
    pub members: Vec<usize>,
}

/// A rooted merge tree over a graph-with-field.
#[derive(Debug, Clone)]
pub struct MergeTree {
    pub p: f64,
    pub nodes: Vec<MergeNode>,
    pub root: usize,
    /// Minimal elements of the ≼ order: nodes without children.
    pub leaves: Vec<usize>,
    /// α_p: graph vertex → node id.
    pub vertex_node: Vec<usize>,
    /// Free-form origin metadata carried into serialized trees.
    pub provenance: serde_json::Value,
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        let mut root = v;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[v] != root {
            let next = self.parent[v];
            self.parent[v] = root;
            v = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let mut a = self.find(a);
        let mut b = self.find(b);
        if a == b {
            return;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] = self.rank[a].saturating_add(1);
        }
    }
}

/// Build the merge tree of a covering graph under a deviation field given by
/// `values` on its cover vertices, weighted by the graph's ω.
pub fn build_tree(graph: &CoveringGraph, values: &[f64], p: f64) -> Result<MergeTree> {
    if values.len() != graph.len() {
        return Err(Error::FieldLength {
            expected: graph.len(),
            got: values.len(),
        });
    }
    build_tree_raw(&graph.adj, values, &graph.omega, p)
}

/// Convenience wrapper for a binned field on a covering graph.
pub fn build_tree_binned(graph: &CoveringGraph, field: &BinnedField) -> Result<MergeTree> {
    build_tree(graph, field.values.as_slice().unwrap(), field.p)
}

/// Build the merge tree of an arbitrary connected graph with per-vertex field
/// values and weights.
///
/// Rejects disconnected graphs with a diagnostic listing the components; the
/// quotient of a disconnected graph would be a forest.
pub fn build_tree_raw(
    adj: &[Vec<usize>],
    values: &[f64],
    weights: &[f64],
    p: f64,
) -> Result<MergeTree> {
    let n = adj.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if values.len() != n || weights.len() != n {
        return Err(Error::FieldLength {
            expected: n,
            got: values.len().min(weights.len()),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap().then(a.cmp(&b)));

    let mut uf = UnionFind::new(n);
    let mut active = vec![false; n];
    let mut in_batch = vec![false; n];
    // Top node of each live component, indexed by union-find root.
    let mut comp_top: Vec<usize> = vec![usize::MAX; n];
    let mut nodes: Vec<MergeNode> = Vec::new();
    let mut vertex_node = vec![usize::MAX; n];

    let mut start = 0;
    while start < order.len() {
        // Batch of values within BATCH_TOL of their predecessor (chained).
        let mut end = start + 1;
        while end < order.len() && values[order[end]] - values[order[end - 1]] <= BATCH_TOL {
            end += 1;
        }
        let batch = &order[start..end];
        let height = values[batch[0]];

        for &v in batch {
            active[v] = true;
            in_batch[v] = true;
        }
        // Tops of the pre-existing components this batch touches, recorded
        // before any union reshuffles the roots.
        let mut touched: Vec<(usize, usize)> = Vec::new(); // (batch vertex, top node)
        for &v in batch {
            for &u in &adj[v] {
                if active[u] && !in_batch[u] {
                    touched.push((v, comp_top[uf.find(u)]));
                }
            }
        }
        for &v in batch {
            for &u in &adj[v] {
                if active[u] {
                    uf.union(v, u);
                }
            }
        }
        // Group batch vertices by final component, keeping first-seen order.
        let mut group_of_root: Vec<(usize, usize)> = Vec::new(); // (root, group index)
        let mut groups: Vec<(Vec<usize>, Vec<usize>)> = Vec::new(); // (members, child tops)
        let group_index = |root: usize,
                               group_of_root: &mut Vec<(usize, usize)>,
                               groups: &mut Vec<(Vec<usize>, Vec<usize>)>| {
            if let Some(&(_, g)) = group_of_root.iter().find(|&&(r, _)| r == root) {
                g
            } else {
                groups.push((Vec::new(), Vec::new()));
                group_of_root.push((root, groups.len() - 1));
                groups.len() - 1
            }
        };
        for &v in batch {
            let g = group_index(uf.find(v), &mut group_of_root, &mut groups);
            groups[g].0.push(v);
        }
        for &(v, top) in &touched {
            let g = group_index(uf.find(v), &mut group_of_root, &mut groups);
            if !groups[g].1.contains(&top) {
                groups[g].1.push(top);
            }
        }
        for (g, (members, mut tops)) in groups.into_iter().enumerate() {
            tops.sort_unstable();
            let id = nodes.len();
            let mass = members.iter().map(|&v| weights[v]).sum();
            for &c in &tops {
                nodes[c].parent = Some(id);
            }
            for &v in &members {
                vertex_node[v] = id;
            }
            let root = group_of_root.iter().find(|&&(_, gi)| gi == g).unwrap().0;
            comp_top[uf.find(root)] = id;
            nodes.push(MergeNode {
                id,
                height,
                mass,
                parent: None,
                members,
            });
        }
        for &v in batch {
            in_batch[v] = false;
        }
        start = end;
    }

    // Connectivity check: everything must have merged into one component.
    let root0 = uf.find(0);
    if (1..n).any(|v| uf.find(v) != root0) {
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut root_ids: Vec<usize> = Vec::new();
        for v in 0..n {
            let r = uf.find(v);
            match root_ids.iter().position(|&x| x == r) {
                Some(k) => comps[k].push(v),
                None => {
                    root_ids.push(r);
                    comps.push(vec![v]);
                }
            }
        }
        let summary = comps
            .iter()
            .map(|c| {
                if c.len() > 8 {
                    format!("[{} vertices starting at {}]", c.len(), c[0])
                } else {
                    format!("{c:?}")
                }
            })
            .collect::<Vec<_>>()
            .join(", ");
        return Err(Error::DisconnectedGraph { summary });
    }

    let root = comp_top[root0];
    let leaves = leaves_of(&nodes);
    Ok(MergeTree {
        p,
        nodes,
        root,
        leaves,
        vertex_node,
        provenance: serde_json::Value::Null,
    })
}

fn leaves_of(nodes: &[MergeNode]) -> Vec<usize> {
    let mut has_child = vec![false; nodes.len()];
    for node in nodes {
        if let Some(p) = node.parent {
            has_child[p] = true;
        }
    }
    (0..nodes.len()).filter(|&i| !has_child[i]).collect()
}

impl MergeTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Children lists derived from the parent links, id-sorted.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for node in &self.nodes {
            if let Some(p) = node.parent {
                out[p].push(node.id);
            }
        }
        out
    }

    /// Node masses (the pushforward measure ω_p).
    pub fn pushforward_measure(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.mass).collect()
    }

    /// Structural invariants: single root, height monotonicity along parent
    /// links, unit total mass, leaves = nodes without children, and chain
    /// ancestor sets (each node has at most one parent by construction).
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let mut roots = 0;
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i {
                return Err(Error::InvalidInput(format!("node {i} has id {}", node.id)));
            }
            match node.parent {
                None => roots += 1,
                Some(p) => {
                    if p >= n {
                        return Err(Error::InvalidInput(format!("node {i} parent {p} out of range")));
                    }
                    if self.nodes[p].height < node.height {
                        return Err(Error::InvalidInput(format!(
                            "height monotonicity: node {i} at {} above parent {p} at {}",
                            node.height, self.nodes[p].height
                        )));
                    }
                    if p == i {
                        return Err(Error::InvalidInput(format!("node {i} is its own parent")));
                    }
                }
            }
        }
        if roots != 1 || self.nodes[self.root].parent.is_some() {
            return Err(Error::InvalidInput(format!("expected 1 root, found {roots}")));
        }
        let total: f64 = self.nodes.iter().map(|n| n.mass).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "measure normalization: node masses sum to {total}"
            )));
        }
        let leaves = leaves_of(&self.nodes);
        if leaves != self.leaves {
            return Err(Error::InvalidInput("stored leaves out of date".into()));
        }
        // Every node must reach the root (no cycles in parent links).
        for mut v in 0..n {
            let mut hops = 0;
            while let Some(p) = self.nodes[v].parent {
                v = p;
                hops += 1;
                if hops > n {
                    return Err(Error::InvalidInput("parent links contain a cycle".into()));
                }
            }
            if v != self.root {
                return Err(Error::InvalidInput(format!("node does not reach the root")));
            }
        }
        Ok(())
    }

    /// Prune leaves whose persistence (merge height − leaf height) is below
    /// `min_persistence`, always removing the least persistent leaf first.
    ///
    /// A removed leaf hands its mass and members to its parent; a parent left
    /// with a single child is collapsed into that child, so in the binary case
    /// the mass ends up on the sibling branch. `min_persistence = 0` returns
    /// an identical tree.
    pub fn simplify(&self, min_persistence: f64) -> Result<MergeTree> {
        if min_persistence < 0.0 {
            return Err(Error::InvalidInput(format!(
                "min_persistence = {min_persistence} must be >= 0"
            )));
        }
        let n = self.nodes.len();
        let mut alive = vec![true; n];
        let mut mass: Vec<f64> = self.nodes.iter().map(|nd| nd.mass).collect();
        let mut members: Vec<Vec<usize>> = self.nodes.iter().map(|nd| nd.members.clone()).collect();
        let mut parent: Vec<Option<usize>> = self.nodes.iter().map(|nd| nd.parent).collect();
        let mut children: Vec<Vec<usize>> = self.children();
        let mut root = self.root;

        loop {
            // Least persistent prunable leaf.
            let mut pick: Option<(f64, usize)> = None;
            for v in 0..n {
                if !alive[v] || v == root || !children[v].is_empty() {
                    continue;
                }
                let p = parent[v].expect("non-root leaf has a parent");
                let pers = self.nodes[p].height - self.nodes[v].height;
                if pers < min_persistence {
                    let better = match pick {
                        None => true,
                        Some((best, at)) => pers < best || (pers == best && v < at),
                    };
                    if better {
                        pick = Some((pers, v));
                    }
                }
            }
            let Some((_, leaf)) = pick else { break };
            let p = parent[leaf].unwrap();
            alive[leaf] = false;
            mass[p] += mass[leaf];
            let moved = std::mem::take(&mut members[leaf]);
            members[p].extend(moved);
            children[p].retain(|&c| c != leaf);
            // Collapse a now-degenerate parent into its surviving child.
            if children[p].len() == 1 {
                let c = children[p][0];
                alive[p] = false;
                mass[c] += mass[p];
                let moved = std::mem::take(&mut members[p]);
                members[c].extend(moved);
                parent[c] = parent[p];
                match parent[p] {
                    Some(g) => {
                        for slot in children[g].iter_mut() {
                            if *slot == p {
                                *slot = c;
                            }
                        }
                    }
                    None => root = c,
                }
            }
        }

        // Reindex survivors.
        let mut remap = vec![usize::MAX; n];
        let mut out_nodes = Vec::new();
        for v in 0..n {
            if alive[v] {
                remap[v] = out_nodes.len();
                let mut m = std::mem::take(&mut members[v]);
                m.sort_unstable();
                out_nodes.push(MergeNode {
                    id: remap[v],
                    height: self.nodes[v].height,
                    mass: mass[v],
                    parent: None,
                    members: m,
                });
            }
        }
        for v in 0..n {
            if alive[v] {
                out_nodes[remap[v]].parent = parent[v].map(|p| remap[p]);
            }
        }
        let mut vertex_node = vec![usize::MAX; self.vertex_node.len()];
        for node in &out_nodes {
            for &v in &node.members {
                vertex_node[v] = node.id;
            }
        }
        let leaves = leaves_of(&out_nodes);
        Ok(MergeTree {
            p: self.p,
            nodes: out_nodes,
            root: remap[root],
            leaves,
            vertex_node,
            provenance: self.provenance.clone(),
        })
    }
}

/// On-disk JSON schema for a merge tree.
#[derive(Debug, Serialize, Deserialize)]
struct TreeJson {
    p: f64,
    nodes: Vec<MergeNode>,
    provenance: serde_json::Value,
}

impl MergeTree {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&TreeJson {
            p: self.p,
            nodes: self.nodes.clone(),
            provenance: self.provenance.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TreeJson = serde_json::from_str(text)?;
        let n = doc.nodes.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        for (i, node) in doc.nodes.iter().enumerate() {
            if node.id != i {
                return Err(Error::InvalidInput(format!(
                    "tree json: node at position {i} has id {}",
                    node.id
                )));
            }
        }
        let mut roots = doc.nodes.iter().filter(|n| n.parent.is_none());
        let root = roots
            .next()
            .ok_or_else(|| Error::InvalidInput("tree json: no root".into()))?
            .id;
        if roots.next().is_some() {
            return Err(Error::InvalidInput("tree json: multiple roots".into()));
        }
        let max_member = doc
            .nodes
            .iter()
            .flat_map(|n| n.members.iter())
            .copied()
            .max();
        let mut vertex_node = vec![usize::MAX; max_member.map_or(0, |m| m + 1)];
        for node in &doc.nodes {
            for &v in &node.members {
                vertex_node[v] = node.id;
            }
        }
        let leaves = leaves_of(&doc.nodes);
        Ok(MergeTree {
            p: doc.p,
            nodes: doc.nodes,
            root,
            leaves,
            vertex_node,
            provenance: doc.provenance,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covergraph::{bin_field, build_cover};
    use crate::deviation::{deviation_field, PseudoMetricSpec};
    use crate::mmspace::{circle_grid, MetricId, MetricMeasureSpace};

    fn path_adj(n: usize) -> Vec<Vec<usize>> {
        (0..n)
            .map(|v| {
                let mut a = Vec::new();
                if v > 0 {
                    a.push(v - 1);
                }
                if v + 1 < n {
                    a.push(v + 1);
                }
                a
            })
            .collect()
    }

    fn uniform(n: usize) -> Vec<f64> {
        vec![1.0 / n as f64; n]
    }

    #[test]
    fn constant_field_single_node() {
        let adj = path_adj(5);
        let tree = build_tree_raw(&adj, &[0.7; 5], &uniform(5), 2.0).unwrap();
        assert_eq!(tree.len(), 1);
        assert_eq!(tree.root, 0);
        assert_eq!(tree.leaves, vec![0]);
        assert!((tree.nodes[0].mass - 1.0).abs() < 1e-12);
        tree.validate().unwrap();
    }

    #[test]
    fn path_two_leaves_merge() {
        // a–b–c with field [0, 1, 0]: two leaves at height 0 merging at 1.
        let adj = path_adj(3);
        let tree = build_tree_raw(&adj, &[0.0, 1.0, 0.0], &uniform(3), 2.0).unwrap();
        assert_eq!(tree.len(), 3);
        assert_eq!(tree.leaves.len(), 2);
        for &l in &tree.leaves {
            assert_eq!(tree.nodes[l].height, 0.0);
        }
        assert_eq!(tree.nodes[tree.root].height, 1.0);
        let total: f64 = tree.pushforward_measure().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        // Masses: leaves 1/3 each, merge node 1/3.
        for node in &tree.nodes {
            assert!((node.mass - 1.0 / 3.0).abs() < 1e-12);
        }
        tree.validate().unwrap();
    }

    #[test]
    fn monotone_chain_keeps_classes() {
        // Strictly increasing field on a path: one class per vertex, root at the top.
        let adj = path_adj(4);
        let tree = build_tree_raw(&adj, &[0.0, 0.5, 1.0, 1.5], &uniform(4), 2.0).unwrap();
        assert_eq!(tree.len(), 4);
        assert_eq!(tree.leaves.len(), 1);
        assert_eq!(tree.nodes[tree.root].height, 1.5);
        tree.validate().unwrap();
    }

    #[test]
    fn equal_value_batch_collapses() {
        // Two vertices at the same value in one component become one node.
        let adj = path_adj(3);
        let tree = build_tree_raw(&adj, &[0.5, 0.5, 0.5], &uniform(3), 1.0).unwrap();
        assert_eq!(tree.len(), 1);
        // But separated equal-value vertices stay distinct classes.
        let tree = build_tree_raw(&adj, &[0.0, 1.0, 0.0], &uniform(3), 1.0).unwrap();
        assert_eq!(tree.leaves.len(), 2);
    }

    #[test]
    fn disconnected_graph_rejected_with_components() {
        let adj = vec![vec![1], vec![0], vec![3], vec![2]];
        let err = build_tree_raw(&adj, &[0.0, 1.0, 0.0, 1.0], &uniform(4), 2.0).unwrap_err();
        match err {
            Error::DisconnectedGraph { summary } => {
                assert!(summary.contains("[0, 1]"), "summary: {summary}");
                assert!(summary.contains("[2, 3]"), "summary: {summary}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn bimodal_circle_cover_tree_has_two_leaves() {
        // 200-point circle grid weighted by the bimodal density, δ-cover BMT.
        let n = 200;
        let coords = circle_grid(n);
        let dist = crate::mmspace::Distribution::CircleBimodal;
        let raw: Vec<f64> = coords
            .iter()
            .map(|c| {
                dist.pdf(&crate::mmspace::SpaceKind::Circle, c).unwrap()
            })
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let host =
            MetricMeasureSpace::build(coords, MetricId::CircleGeodesic, Some(weights)).unwrap();
        let graph = build_cover(&host, 0.05).unwrap();
        let cover_space = graph.as_space(&host).unwrap();
        let field = deviation_field(&cover_space, 2.0, &PseudoMetricSpec::Base).unwrap();
        let binned = bin_field(&field, 0.02).unwrap();
        let tree = build_tree_binned(&graph, &binned).unwrap();
        let simplified = tree.simplify(0.01).unwrap();
        assert_eq!(
            simplified.leaves.len(),
            2,
            "bimodal deviation field should give a two-leaf tree"
        );
        simplified.validate().unwrap();
        // Cross-check the unsimplified sweep against a fresh brute-force sweep
        // of sublevel component counts: leaf count = number of field values
        // that create a new component.
        let values = binned.values.as_slice().unwrap();
        let mut leaf_count = 0;
        let mut dedup: Vec<f64> = values.to_vec();
        dedup.sort_by(|a, b| a.partial_cmp(b).unwrap());
        dedup.dedup();
        let mut prev_components = 0usize;
        for &t in &dedup {
            let mut uf = UnionFind::new(graph.len());
            let act: Vec<bool> = values.iter().map(|&v| v <= t).collect();
            for &(a, b) in &graph.edges {
                if act[a] && act[b] {
                    uf.union(a, b);
                }
            }
            let mut roots: Vec<usize> = (0..graph.len())
                .filter(|&v| act[v])
                .map(|v| uf.find(v))
                .collect();
            roots.sort_unstable();
            roots.dedup();
            let born = roots.len() as isize - prev_components as isize;
            if born > 0 {
                leaf_count += born as usize;
            }
            prev_components = roots.len();
        }
        assert_eq!(tree.leaves.len(), leaf_count);
    }

    #[test]
    fn simplify_zero_is_identity() {
        let adj = path_adj(5);
        let tree = build_tree_raw(&adj, &[0.0, 0.4, 0.1, 0.8, 0.2], &uniform(5), 2.0).unwrap();
        let same = tree.simplify(0.0).unwrap();
        assert_eq!(same.len(), tree.len());
        for (a, b) in tree.nodes.iter().zip(&same.nodes) {
            assert_eq!(a.height, b.height);
            assert_eq!(a.mass, b.mass);
            assert_eq!(a.parent, b.parent);
            assert_eq!(a.members, b.members);
        }
    }

    #[test]
    fn simplify_prunes_short_leaf_and_contracts() {
        // Two leaves with persistences 0.5 and 0.01; threshold 0.1 removes the
        // short one and the chain collapses to a single node of mass 1.
        let adj = path_adj(3);
        let tree = build_tree_raw(&adj, &[0.0, 0.5, 0.49], &uniform(3), 2.0).unwrap();
        assert_eq!(tree.leaves.len(), 2);
        let simplified = tree.simplify(0.1).unwrap();
        assert_eq!(simplified.len(), 1);
        assert!((simplified.nodes[0].mass - 1.0).abs() < 1e-12);
        assert_eq!(simplified.nodes[0].members.len(), 3);
    }

    #[test]
    fn simplify_everything_gives_single_node() {
        let adj = path_adj(7);
        let values = [0.0, 0.9, 0.2, 0.7, 0.05, 0.8, 0.3];
        let tree = build_tree_raw(&adj, &values, &uniform(7), 2.0).unwrap();
        let collapsed = tree.simplify(10.0).unwrap();
        assert_eq!(collapsed.len(), 1);
        assert!((collapsed.nodes[0].mass - 1.0).abs() < 1e-12);
        assert_eq!(collapsed.leaves, vec![0]);
    }

    #[test]
    fn simplify_conserves_mass() {
        let adj = path_adj(9);
        let values = [0.1, 0.6, 0.2, 0.9, 0.0, 0.5, 0.15, 0.7, 0.05];
        let mut weights = uniform(9);
        weights[4] = weights[4] + 0.0; // uniform is fine
        let tree = build_tree_raw(&adj, &values, &weights, 2.0).unwrap();
        for threshold in [0.0, 0.05, 0.2, 0.6, 2.0] {
            let s = tree.simplify(threshold).unwrap();
            let total: f64 = s.pushforward_measure().iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "threshold {threshold}");
            s.validate().unwrap();
        }
    }

    #[test]
    fn json_round_trip() {
        let adj = path_adj(5);
        let mut tree =
            build_tree_raw(&adj, &[0.0, 0.4, 0.1, 0.8, 0.2], &uniform(5), 2.0).unwrap();
        tree.provenance = serde_json::json!({"source": "test"});
        let text = tree.to_json().unwrap();
        let back = MergeTree::from_json(&text).unwrap();
        assert_eq!(back.len(), tree.len());
        assert_eq!(back.root, tree.root);
        assert_eq!(back.leaves, tree.leaves);
        assert_eq!(back.vertex_node, tree.vertex_node);
        for (a, b) in tree.nodes.iter().zip(&back.nodes) {
            assert_eq!(a.height, b.height);
            assert_eq!(a.parent, b.parent);
            assert_eq!(a.members, b.members);
        }
    }
}
