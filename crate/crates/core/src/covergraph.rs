//! δ-covering graphs with the 3δ edge rule, merge radii, connectivity moduli
//! and ε-binning of deviation fields.
//!
//! A δ-cover of a host space is a vertex subset within distance δ of every
//! host vertex; cover vertices are joined by an edge when their distance is
//! at most 3δ. Host mass is pushed onto the cover through the assignment map,
//! giving the finite mm-space the merge tree is built on.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::deviation::DeviationField;
use crate::mmspace::MetricMeasureSpace;
use crate::{Error, Result};

/// Seed for pair subsampling in [`connectivity_modulus`] on large graphs.
const MODULUS_SAMPLE_SEED: u64 = 0x636f7665;
/// Pair budget when subsampling the connectivity modulus.
const MODULUS_SAMPLE_PAIRS: usize = 100_000;

/// A δ-covering graph over a host space.
#[derive(Debug, Clone)]
pub struct CoveringGraph {
    /// Host-vertex indices of the cover, in greedy selection order.
    pub cover: Vec<usize>,
    pub delta: f64,
    /// Unordered edges as cover-local index pairs, i < j.
    pub edges: Vec<(usize, usize)>,
    /// Cover-local representative of every host vertex (the map φ).
    pub assign: Vec<usize>,
    /// Induced cover weights: pushforward of the host weights through φ.
    pub omega: Vec<f64>,
    /// Induced distance matrix on the cover (d_V).
    pub dist: Array2<f64>,
    /// Adjacency lists (cover-local).
    pub adj: Vec<Vec<usize>>,
}

impl CoveringGraph {
    pub fn len(&self) -> usize {
        self.cover.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cover.is_empty()
    }

    /// The cover as an mm-space of its own: induced metric plus ω weights.
    pub fn as_space(&self, host: &MetricMeasureSpace) -> Result<MetricMeasureSpace> {
        host.restrict(&self.cover, self.omega.clone())
    }

    /// Push an external point set onto the cover: each point goes to its
    /// nearest cover vertex (lowest host index on ties) and contributes 1/n.
    /// Needs host coordinates to measure distances to the new points.
    pub fn push_points(
        &self,
        host: &MetricMeasureSpace,
        points: &[Vec<f64>],
    ) -> Result<Vec<f64>> {
        if points.is_empty() {
            return Err(Error::EmptySample);
        }
        let coords = host.coords.as_ref().ok_or_else(|| Error::MissingThetaInput {
            kind: "cover pushforward".into(),
            what: "host coordinates".into(),
        })?;
        let mut omega = vec![0.0f64; self.len()];
        let share = 1.0 / points.len() as f64;
        for pt in points {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (c, &cv) in self.cover.iter().enumerate() {
                let d = host.metric.distance(pt, &coords[cv])?;
                if d < best_d || (d == best_d && cv < self.cover[best]) {
                    best_d = d;
                    best = c;
                }
            }
            omega[best] += share;
        }
        Ok(omega)
    }

    /// True when the 3δ graph is connected.
    pub fn is_connected(&self) -> bool {
        let m = self.len();
        if m == 0 {
            return false;
        }
        let mut seen = vec![false; m];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &self.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == m
    }
}

/// Build a δ-cover of the host by greedy farthest-point selection starting
/// from vertex 0, assign every host vertex to its nearest cover vertex
/// (lowest host index on ties), and connect cover vertices at distance ≤ 3δ.
pub fn build_cover(host: &MetricMeasureSpace, delta: f64) -> Result<CoveringGraph> {
    if delta <= 0.0 {
        return Err(Error::InvalidDelta(delta));
    }
    let n = host.n;
    let mut cover: Vec<usize> = vec![0];
    let mut dist_to_cover: Vec<f64> = (0..n).map(|v| host.dist[[v, 0]]).collect();
    loop {
        let (far, &far_d) = dist_to_cover
            .iter()
            .enumerate()
            .max_by(|(i, a), (j, b)| a.partial_cmp(b).unwrap().then(j.cmp(i)))
            .unwrap();
        if far_d <= delta {
            break;
        }
        cover.push(far);
        for v in 0..n {
            let d = host.dist[[v, far]];
            if d < dist_to_cover[v] {
                dist_to_cover[v] = d;
            }
        }
    }
    let m = cover.len();

    let mut assign = vec![0usize; n];
    for (v, slot) in assign.iter_mut().enumerate() {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (c, &cv) in cover.iter().enumerate() {
            let d = host.dist[[v, cv]];
            if d < best_d || (d == best_d && cv < cover[best]) {
                best_d = d;
                best = c;
            }
        }
        *slot = best;
    }

    let mut omega = vec![0.0f64; m];
    for v in 0..n {
        omega[assign[v]] += host.weights[v];
    }

    let mut dist = Array2::zeros((m, m));
    for a in 0..m {
        for b in 0..m {
            dist[[a, b]] = host.dist[[cover[a], cover[b]]];
        }
    }

    let mut edges = Vec::new();
    let mut adj = vec![Vec::new(); m];
    for a in 0..m {
        for b in (a + 1)..m {
            if dist[[a, b]] <= 3.0 * delta {
                edges.push((a, b));
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }

    Ok(CoveringGraph {
        cover,
        delta,
        edges,
        assign,
        omega,
        dist,
        adj,
    })
}

/// Combinatorial merge radius r_θ(i, j): over all graph paths from i to j,
/// the minimal value of the worst `max(θ(i,z), θ(z,j))` along the path.
///
/// Computed exactly by binary search over the sorted candidate bottleneck
/// values with BFS feasibility checks.
pub fn merge_radius(adj: &[Vec<usize>], theta: &Array2<f64>, i: usize, j: usize) -> Result<f64> {
    if i == j {
        return Ok(theta[[i, i]]);
    }
    let n = adj.len();
    let score = |z: usize| theta[[i, z]].max(theta[[z, j]]);
    let mut candidates: Vec<f64> = (0..n).map(score).collect();
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    candidates.dedup();

    let feasible = |r: f64| -> bool {
        if score(i) > r || score(j) > r {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![i];
        seen[i] = true;
        while let Some(v) = stack.pop() {
            if v == j {
                return true;
            }
            for &u in &adj[v] {
                if !seen[u] && score(u) <= r {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        false
    };

    if !feasible(*candidates.last().unwrap()) {
        return Err(Error::DisconnectedPair { i, j });
    }
    let mut lo = 0usize;
    let mut hi = candidates.len() - 1;
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(candidates[lo])
}

/// Estimate of the θ-connectivity modulus of a graph.
#[derive(Debug, Clone, Copy)]
pub struct ModulusEstimate {
    pub value: f64,
    /// True when all pairs were checked; false when the value is a
    /// seeded-subsample lower bound of K_θ.
    pub exhaustive: bool,
}

/// max over vertex pairs of r_θ(i, j) / base(i, j), skipping zero-distance
/// pairs. All pairs when the graph has at most 500 vertices, a fixed-seed
/// random subset of pairs otherwise (reported as a lower bound).
pub fn connectivity_modulus(
    graph: &CoveringGraph,
    theta: &Array2<f64>,
    base: &Array2<f64>,
) -> Result<ModulusEstimate> {
    if !graph.is_connected() {
        return Err(Error::DisconnectedGraph {
            summary: "connectivity modulus needs a connected graph".into(),
        });
    }
    let m = graph.len();
    let mut best = 0.0f64;
    let consider = |i: usize, j: usize, best: &mut f64| -> Result<()> {
        if base[[i, j]] > 0.0 {
            let r = merge_radius(&graph.adj, theta, i, j)?;
            *best = best.max(r / base[[i, j]]);
        }
        Ok(())
    };
    let exhaustive = m <= 500;
    if exhaustive {
        for i in 0..m {
            for j in (i + 1)..m {
                consider(i, j, &mut best)?;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(MODULUS_SAMPLE_SEED);
        for _ in 0..MODULUS_SAMPLE_PAIRS {
            let i = rng.random_range(0..m);
            let j = rng.random_range(0..m);
            if i != j {
                consider(i, j, &mut best)?;
            }
        }
    }
    Ok(ModulusEstimate {
        value: best,
        exhaustive,
    })
}

/// A deviation field after ε-binning: τ_ε(v) = ε·⌊σ(v)/ε⌋.
#[derive(Debug, Clone)]
pub struct BinnedField {
    pub epsilon: f64,
    pub p: f64,
    pub values: Array1<f64>,
}

/// Floor-quantize a deviation field with bin width ε.
pub fn bin_field(field: &DeviationField, epsilon: f64) -> Result<BinnedField> {
    if epsilon <= 0.0 {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let values = field.values.mapv(|v| epsilon * (v / epsilon).floor());
    Ok(BinnedField {
        epsilon,
        p: field.p,
        values,
    })
}

/// On-disk JSON schema for a covering graph.
#[derive(Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub cover: Vec<usize>,
    pub delta: f64,
    pub edges: Vec<[usize; 2]>,
    pub assign: Vec<usize>,
    pub omega: Vec<f64>,
}

impl CoveringGraph {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&GraphJson {
            cover: self.cover.clone(),
            delta: self.delta,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            assign: self.assign.clone(),
            omega: self.omega.clone(),
        })?)
    }

    /// Rebuild a graph from JSON plus its host space (for the induced metric).
    pub fn from_json(text: &str, host: &MetricMeasureSpace) -> Result<Self> {
        let doc: GraphJson = serde_json::from_str(text)?;
        let m = doc.cover.len();
        if doc.omega.len() != m {
            return Err(Error::WeightLength {
                expected: m,
                got: doc.omega.len(),
            });
        }
        if doc.assign.len() != host.n {
            return Err(Error::InvalidInput(format!(
                "assign has {} entries for a host of size {}",
                doc.assign.len(),
                host.n
            )));
        }
        let mut dist = Array2::zeros((m, m));
        for a in 0..m {
            for b in 0..m {
                dist[[a, b]] = host.dist[[doc.cover[a], doc.cover[b]]];
            }
        }
        let mut adj = vec![Vec::new(); m];
        let mut edges = Vec::with_capacity(doc.edges.len());
        for &[a, b] in &doc.edges {
            if a >= m || b >= m {
                return Err(Error::InvalidInput(format!("edge [{a},{b}] out of range")));
            }
            edges.push((a, b));
            adj[a].push(b);
            adj[b].push(a);
        }
        Ok(CoveringGraph {
            cover: doc.cover,
            delta: doc.delta,
            edges,
            assign: doc.assign,
            omega: doc.omega,
            dist,
            adj,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deviation::{deviation_field, PseudoMetricSpec};
    use crate::mmspace::{circle_grid, MetricId};
    use std::f64::consts::PI;

    fn circle_space(n: usize) -> MetricMeasureSpace {
        MetricMeasureSpace::build(circle_grid(n), MetricId::CircleGeodesic, None).unwrap()
    }

    /// Brute-force oracle: minimax over all simple paths by DFS.
    fn merge_radius_brute(
        adj: &[Vec<usize>],
        theta: &Array2<f64>,
        i: usize,
        j: usize,
    ) -> Option<f64> {
        #[allow(clippy::too_many_arguments)]
        fn dfs(
            adj: &[Vec<usize>],
            theta: &Array2<f64>,
            i: usize,
            j: usize,
            v: usize,
            worst: f64,
            seen: &mut Vec<bool>,
            best: &mut Option<f64>,
        ) {
            let score = theta[[i, v]].max(theta[[v, j]]);
            let worst = worst.max(score);
            if v == j {
                *best = Some(best.map_or(worst, |b: f64| b.min(worst)));
                return;
            }
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    dfs(adj, theta, i, j, u, worst, seen, best);
                    seen[u] = false;
                }
            }
        }
        let mut seen = vec![false; adj.len()];
        seen[i] = true;
        let mut best = None;
        dfs(adj, theta, i, j, i, 0.0, &mut seen, &mut best);
        best
    }

    #[test]
    fn cover_single_vertex_when_delta_exceeds_diameter() {
        let space = circle_space(12);
        let graph = build_cover(&space, 4.0).unwrap();
        assert_eq!(graph.cover, vec![0]);
        assert!(graph.edges.is_empty());
        assert_eq!(graph.omega, vec![1.0]);
    }

    #[test]
    fn fine_cover_of_four_points_is_isolated() {
        let space = circle_space(4); // spacing π/2
        let graph = build_cover(&space, 0.01).unwrap();
        assert_eq!(graph.len(), 4);
        assert!(graph.edges.is_empty(), "spacing π/2 > 3δ");
    }

    #[test]
    fn uniform_circle_cover_is_connected_and_covers() {
        let space = circle_space(100);
        let graph = build_cover(&space, 0.2).unwrap();
        assert!(graph.is_connected());
        // Cover correctness: every host vertex within δ of its representative.
        for v in 0..space.n {
            let c = graph.cover[graph.assign[v]];
            assert!(space.dist[[v, c]] <= graph.delta + 1e-12);
        }
        // ω is the pushforward of the uniform host measure: counts / n.
        let mut counts = vec![0usize; graph.len()];
        for v in 0..space.n {
            counts[graph.assign[v]] += 1;
        }
        for (c, &cnt) in counts.iter().enumerate() {
            assert!((graph.omega[c] - cnt as f64 / space.n as f64).abs() < 1e-12);
        }
        assert!((graph.omega.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn merge_radius_identity_is_zero() {
        let space = circle_space(16);
        let graph = build_cover(&space, 0.4).unwrap();
        assert_eq!(merge_radius(&graph.adj, &graph.dist, 3, 3).unwrap(), 0.0);
    }

    #[test]
    fn merge_radius_path_graph_matches_hops() {
        // Path a–b–c with θ = graph-hop distance: r(a, c) = 2 = θ(a, c).
        let adj = vec![vec![1], vec![0, 2], vec![1]];
        let mut theta = Array2::zeros((3, 3));
        for i in 0..3usize {
            for j in 0..3usize {
                theta[[i, j]] = (i as f64 - j as f64).abs();
            }
        }
        let r = merge_radius(&adj, &theta, 0, 2).unwrap();
        assert_eq!(r, 2.0);
        assert_eq!(r, merge_radius_brute(&adj, &theta, 0, 2).unwrap());
    }

    #[test]
    fn merge_radius_broken_cycle_exceeds_theta() {
        // C8 with one edge removed, θ = geodesic distance of the full circle:
        // crossing the gap forces a detour, so r > θ there.
        let n = 8;
        let space = circle_space(n);
        let mut adj = vec![Vec::new(); n];
        for v in 0..n - 1 {
            adj[v].push(v + 1);
            adj[v + 1].push(v);
        }
        let theta = space.dist.clone();
        let r = merge_radius(&adj, &theta, 0, n - 1).unwrap();
        assert!(r > theta[[0, n - 1]] + 1e-12);
        assert_eq!(r, merge_radius_brute(&adj, &theta, 0, n - 1).unwrap());
    }

    #[test]
    fn merge_radius_exact_matches_brute_force_exhaustively() {
        // All graphs on 5 vertices, θ from a deterministic scattered point set.
        let n = 5;
        let pts: Vec<Vec<f64>> = (0..n).map(|k| vec![1.3 * k as f64]).collect();
        let space = MetricMeasureSpace::build(pts, MetricId::CircleGeodesic, None).unwrap();
        let theta = &space.dist;
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
            .collect();
        for mask in 0u32..(1 << pairs.len()) {
            let mut adj = vec![Vec::new(); n];
            for (e, &(a, b)) in pairs.iter().enumerate() {
                if mask & (1 << e) != 0 {
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    match merge_radius_brute(&adj, theta, i, j) {
                        None => {
                            assert!(merge_radius(&adj, theta, i, j).is_err());
                        }
                        Some(expect) => {
                            let got = merge_radius(&adj, theta, i, j).unwrap();
                            assert_eq!(got, expect, "mask={mask} pair=({i},{j})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn merge_radius_dominates_theta() {
        let space = circle_space(40);
        let graph = build_cover(&space, 0.25).unwrap();
        for i in 0..graph.len() {
            for j in 0..graph.len() {
                let r = merge_radius(&graph.adj, &graph.dist, i, j).unwrap();
                assert!(r >= graph.dist[[i, j]] - 1e-12);
                let rj = merge_radius(&graph.adj, &graph.dist, j, i).unwrap();
                assert_eq!(r, rj, "merge radius must be symmetric");
            }
        }
    }

    #[test]
    fn modulus_complete_graph_is_one() {
        let space = circle_space(12);
        let mut graph = build_cover(&space, 0.01).unwrap();
        let m = graph.len();
        graph.edges.clear();
        graph.adj = vec![Vec::new(); m];
        for a in 0..m {
            for b in (a + 1)..m {
                graph.edges.push((a, b));
                graph.adj[a].push(b);
                graph.adj[b].push(a);
            }
        }
        let theta = graph.dist.clone();
        let est = connectivity_modulus(&graph, &theta, &theta).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
        assert!(est.exhaustive);
    }

    #[test]
    fn modulus_path_graph_with_metric_distances() {
        // Path with consecutive edges and the line metric: K = 1.
        let n = 8;
        let pts: Vec<Vec<f64>> = (0..n).map(|k| vec![k as f64 * 0.1]).collect();
        let space = MetricMeasureSpace::build(pts, MetricId::Euclidean { dim: 1 }, None).unwrap();
        let graph = build_cover(&space, 0.04).unwrap();
        assert_eq!(graph.len(), n);
        let theta = graph.dist.clone();
        let est = connectivity_modulus(&graph, &theta, &theta).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn modulus_broken_cycle_exceeds_one() {
        let n = 8;
        let space = circle_space(n);
        let mut graph = build_cover(&space, 0.01).unwrap();
        assert_eq!(graph.len(), n);
        graph.edges.clear();
        graph.adj = vec![Vec::new(); n];
        for v in 0..n - 1 {
            graph.edges.push((v, v + 1));
            graph.adj[v].push(v + 1);
            graph.adj[v + 1].push(v);
        }
        let theta = graph.dist.clone();
        let est = connectivity_modulus(&graph, &theta, &theta).unwrap();
        assert!(est.value > 1.0 + 1e-9);
    }

    #[test]
    fn modulus_rejects_disconnected() {
        let space = circle_space(4);
        let graph = build_cover(&space, 0.01).unwrap();
        let theta = graph.dist.clone();
        assert!(matches!(
            connectivity_modulus(&graph, &theta, &theta),
            Err(Error::DisconnectedGraph { .. })
        ));
    }

    #[test]
    fn bin_field_floor_arithmetic() {
        let space = circle_space(4);
        let mut field = deviation_field(&space, 1.0, &PseudoMetricSpec::Base).unwrap();
        field.values = ndarray::arr1(&[0.0, 0.9, 1.0, 1.1]);
        let binned = bin_field(&field, 1.0).unwrap();
        assert_eq!(binned.values.to_vec(), vec![0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn bin_field_tiny_epsilon_near_identity() {
        let space = circle_space(64);
        let field = deviation_field(&space, 2.0, &PseudoMetricSpec::Base).unwrap();
        let binned = bin_field(&field, 1e-12).unwrap();
        for (a, b) in field.values.iter().zip(binned.values.iter()) {
            assert!(b <= a && a - b < 1e-12 + 1e-15);
        }
    }

    #[test]
    fn bin_field_constant_half_circle_median() {
        // σ₁ ≡ π/2 for the half/half Dirac pair; ε = 0.1 bins it to 1.5.
        let n = 720;
        let mut weights = vec![0.0; n];
        weights[0] = 0.5;
        weights[n / 2] = 0.5;
        let space =
            MetricMeasureSpace::build(circle_grid(n), MetricId::CircleGeodesic, Some(weights))
                .unwrap();
        let field = deviation_field(&space, 1.0, &PseudoMetricSpec::Base).unwrap();
        let binned = bin_field(&field, 0.1).unwrap();
        let expected = 0.1 * (PI / 2.0 / 0.1).floor();
        assert_eq!(expected, 1.5);
        for &v in binned.values.iter() {
            assert_eq!(v, 1.5);
        }
    }

    #[test]
    fn bin_field_rejects_bad_epsilon() {
        let space = circle_space(4);
        let field = deviation_field(&space, 1.0, &PseudoMetricSpec::Base).unwrap();
        assert!(matches!(
            bin_field(&field, 0.0),
            Err(Error::InvalidEpsilon(_))
        ));
    }

    #[test]
    fn prop_merge_radius_bounded_by_modulus_times_admissibility() {
        // r_θ(i,j) ≤ K·L·d(i,j) + tol with K the base-metric modulus and L the
        // empirical admissibility constant of θ.
        let space = circle_space(48);
        let graph = build_cover(&space, 0.3).unwrap();
        let base = graph.dist.clone();
        let kernel = base.mapv(|d| (-2.0 * d * d).exp());
        let cover_space = graph.as_space(&space).unwrap();
        let pm = PseudoMetricSpec::KernelMatrix {
            q: 2.0,
            kernel,
            ref_weights: None,
        };
        let theta = crate::deviation::materialize_theta(&cover_space, &pm).unwrap();
        let l = crate::deviation::admissibility_constant(&cover_space, &pm)
            .unwrap()
            .empirical;
        let k = connectivity_modulus(&graph, &base, &base).unwrap().value;
        for i in 0..graph.len() {
            for j in 0..graph.len() {
                if i == j {
                    continue;
                }
                let r = merge_radius(&graph.adj, &theta, i, j).unwrap();
                assert!(
                    r <= k * l * base[[i, j]] + 1e-9,
                    "({i},{j}): r = {r}, bound = {}",
                    k * l * base[[i, j]]
                );
            }
        }
    }

    #[test]
    fn push_points_matches_host_assignment() {
        let space = circle_space(50);
        let graph = build_cover(&space, 0.3).unwrap();
        // Pushing the host's own coordinates reproduces ω for uniform weights.
        let coords = space.coords.clone().unwrap();
        let omega = graph.push_points(&space, &coords).unwrap();
        for (a, b) in omega.iter().zip(&graph.omega) {
            assert!((a - b).abs() < 1e-12);
        }
        // A single off-grid point lands on its nearest cover vertex.
        let omega = graph.push_points(&space, &[vec![0.01]]).unwrap();
        assert_eq!(omega[0], 1.0);
    }

    #[test]
    fn graph_json_round_trip() {
        let space = circle_space(30);
        let graph = build_cover(&space, 0.5).unwrap();
        let text = graph.to_json().unwrap();
        let back = CoveringGraph::from_json(&text, &space).unwrap();
        assert_eq!(back.cover, graph.cover);
        assert_eq!(back.edges, graph.edges);
        assert_eq!(back.assign, graph.assign);
        assert_eq!(back.omega, graph.omega);
        assert_eq!(back.dist, graph.dist);
    }
}
