//! Exact solver for the dense transportation problem.
//!
//! Classical transportation (network) simplex: a north-west-corner starting
//! basis, potentials recomputed from the basis tree, block pivot search over
//! the dense arc matrix, and leaving-arc selection on the unique basis cycle.
//! Flows and potentials are rebuilt from scratch each pivot, so no float
//! drift accumulates across pivots.

use ndarray::Array2;

use crate::{Error, Result};

/// Reduced costs above `-ENTER_TOL * scale` are treated as nonnegative.
const ENTER_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy)]
struct Arc {
    src: usize,
    snk: usize, // sink index in 0..n (node id is m + snk)
    flow: f64,
}

/// Solve `min Σ cost[i][j]·P[i][j]` over couplings of `a` and `b`.
///
/// Returns the optimal plan and its objective value. Supplies and demands must
/// be nonnegative and sum to the same total (callers pass probability
/// vectors). Zero-mass rows and columns are allowed.
pub fn solve(cost: &Array2<f64>, a: &[f64], b: &[f64]) -> Result<(Array2<f64>, f64)> {
    let m = a.len();
    let n = b.len();
    if cost.nrows() != m || cost.ncols() != n {
        return Err(Error::MatrixShape {
            rows: cost.nrows(),
            cols: cost.ncols(),
            expected_rows: m,
            expected_cols: n,
        });
    }
    let sum_a: f64 = a.iter().sum();
    let sum_b: f64 = b.iter().sum();
    if (sum_a - sum_b).abs() > 1e-8 {
        return Err(Error::MarginalMismatch {
            source_sum: sum_a,
            target_sum: sum_b,
        });
    }

    // North-west corner starting basis: exactly m+n-1 arcs forming a spanning
    // tree of the bipartite supply/demand graph.
    let mut arcs: Vec<Arc> = Vec::with_capacity(m + n - 1);
    {
        let mut ra = a.to_vec();
        let mut rb = b.to_vec();
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            let f = ra[i].min(rb[j]);
            arcs.push(Arc {
                src: i,
                snk: j,
                flow: f,
            });
            ra[i] -= f;
            rb[j] -= f;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if ra[i] <= rb[j] && i < m - 1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        debug_assert_eq!(arcs.len(), m + n - 1);
    }

    let nodes = m + n;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for (idx, arc) in arcs.iter().enumerate() {
        adj[arc.src].push(idx);
        adj[m + arc.snk].push(idx);
    }

    let mut parent = vec![usize::MAX; nodes];
    let mut parent_arc = vec![usize::MAX; nodes];
    let mut pot = vec![0.0f64; nodes];
    let mut bfs_order: Vec<usize> = Vec::with_capacity(nodes);

    // Rebuild parents, depths and potentials from the basis tree.
    let rebuild = |adj: &[Vec<usize>],
                   arcs: &[Arc],
                   parent: &mut [usize],
                   parent_arc: &mut [usize],
                   pot: &mut [f64],
                   order: &mut Vec<usize>| {
        parent.fill(usize::MAX);
        parent_arc.fill(usize::MAX);
        order.clear();
        order.push(0);
        parent[0] = 0;
        pot[0] = 0.0;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &e in &adj[v] {
                let arc = arcs[e];
                let w = if v == arc.src { m + arc.snk } else { arc.src };
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    parent_arc[w] = e;
                    pot[w] = cost[[arc.src, arc.snk]] - pot[v];
                    order.push(w);
                }
            }
        }
    };
    rebuild(&adj, &arcs, &mut parent, &mut parent_arc, &mut pot, &mut bfs_order);
    if bfs_order.len() != nodes {
        return Err(Error::InvalidInput(
            "transportation basis is not spanning".into(),
        ));
    }
    let mut depth = vec![0usize; nodes];
    let compute_depth = |parent: &[usize], order: &[usize], depth: &mut [usize]| {
        for &v in order {
            depth[v] = if v == 0 { 0 } else { depth[parent[v]] + 1 };
        }
    };
    compute_depth(&parent, &bfs_order, &mut depth);

    let scale = cost.iter().fold(1.0f64, |acc, &c| acc.max(c.abs()));
    let enter_tol = ENTER_TOL * scale;
    let total = m * n;
    let block = (total as f64).sqrt().ceil() as usize;
    let block = block.max(64).min(total);
    let mut cursor = 0usize;
    let max_pivots = 400 * (m + n).max(1000);

    let mut pivots = 0usize;
    'outer: loop {
        // Entering arc: most negative reduced cost within the first block
        // (cyclic) that contains any negative.
        let mut entering: Option<(usize, usize, f64)> = None;
        let mut scanned = 0usize;
        while scanned < total {
            let mut best: Option<(usize, usize, f64)> = None;
            let upto = block.min(total - scanned);
            for _ in 0..upto {
                let i = cursor / n;
                let j = cursor % n;
                cursor += 1;
                if cursor == total {
                    cursor = 0;
                }
                let rc = cost[[i, j]] - pot[i] - pot[m + j];
                if rc < -enter_tol && best.map_or(true, |(_, _, b)| rc < b) {
                    best = Some((i, j, rc));
                }
            }
            scanned += upto;
            if best.is_some() {
                entering = best;
                break;
            }
        }
        let Some((ei, ej, _)) = entering else {
            break 'outer; // optimal
        };

        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::SimplexNonConvergence(max_pivots));
        }

        // Cycle: tree path between the entering arc's endpoints. Arcs at even
        // positions from either endpoint lose flow (bipartite alternation).
        let (mut x, mut y) = (ei, m + ej);
        let mut path_x: Vec<usize> = Vec::new(); // arc indices from source side
        let mut path_y: Vec<usize> = Vec::new(); // arc indices from sink side
        while x != y {
            if depth[x] >= depth[y] {
                path_x.push(parent_arc[x]);
                x = parent[x];
            } else {
                path_y.push(parent_arc[y]);
                y = parent[y];
            }
        }
        // Minus-arcs: even indices along both walks.
        let mut delta = f64::INFINITY;
        let mut leaving = usize::MAX;
        for (k, &e) in path_x.iter().enumerate() {
            if k % 2 == 0 && arcs[e].flow < delta {
                delta = arcs[e].flow;
                leaving = e;
            }
        }
        for (k, &e) in path_y.iter().enumerate() {
            if k % 2 == 0 && arcs[e].flow < delta {
                delta = arcs[e].flow;
                leaving = e;
            }
        }
        debug_assert!(leaving != usize::MAX);

        for (k, &e) in path_x.iter().enumerate() {
            if k % 2 == 0 {
                arcs[e].flow -= delta;
            } else {
                arcs[e].flow += delta;
            }
        }
        for (k, &e) in path_y.iter().enumerate() {
            if k % 2 == 0 {
                arcs[e].flow -= delta;
            } else {
                arcs[e].flow += delta;
            }
        }

        // Swap the leaving arc for the entering one.
        let old = arcs[leaving];
        adj[old.src].retain(|&e| e != leaving);
        adj[m + old.snk].retain(|&e| e != leaving);
        arcs[leaving] = Arc {
            src: ei,
            snk: ej,
            flow: delta,
        };
        adj[ei].push(leaving);
        adj[m + ej].push(leaving);

        rebuild(&adj, &arcs, &mut parent, &mut parent_arc, &mut pot, &mut bfs_order);
        compute_depth(&parent, &bfs_order, &mut depth);
    }

    let mut plan = Array2::zeros((m, n));
    let mut objective = 0.0;
    for arc in &arcs {
        let f = if arc.flow < 0.0 && arc.flow > -1e-12 {
            0.0
        } else {
            arc.flow
        };
        plan[[arc.src, arc.snk]] += f;
        objective += cost[[arc.src, arc.snk]] * f;
    }
    Ok((plan, objective))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    #[test]
    fn identity_on_matching_diracs() {
        let cost = arr2(&[[0.0, 1.0], [1.0, 0.0]]);
        let (plan, obj) = solve(&cost, &[0.5, 0.5], &[0.5, 0.5]).unwrap();
        assert!(obj.abs() < 1e-15);
        assert!((plan[[0, 0]] - 0.5).abs() < 1e-15);
        assert!((plan[[1, 1]] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn forced_single_pair() {
        let cost = arr2(&[[3.0]]);
        let (plan, obj) = solve(&cost, &[1.0], &[1.0]).unwrap();
        assert_eq!(plan[[0, 0]], 1.0);
        assert_eq!(obj, 3.0);
    }

    #[test]
    fn rectangular_instance() {
        let cost = arr2(&[[1.0, 2.0, 3.0], [4.0, 1.0, 2.0]]);
        let (plan, obj) = solve(&cost, &[0.6, 0.4], &[0.2, 0.5, 0.3]).unwrap();
        // Marginals.
        for (i, &ai) in [0.6, 0.4].iter().enumerate() {
            let row: f64 = (0..3).map(|j| plan[[i, j]]).sum();
            assert!((row - ai).abs() < 1e-12);
        }
        for (j, &bj) in [0.2, 0.5, 0.3].iter().enumerate() {
            let col: f64 = (0..2).map(|i| plan[[i, j]]).sum();
            assert!((col - bj).abs() < 1e-12);
        }
        // Hand-checkable optimum: send 0.2→(0,0), 0.4 of row 0 to col 1 (cost 2)
        // ... verify against brute force over the 2x3 transport polytope corners
        // via a fine grid on the single degree of freedom family? Simpler:
        // compare with an LP-free bound: objective of any feasible plan ≥ obj.
        let feasible = arr2(&[[0.2, 0.4, 0.0], [0.0, 0.1, 0.3]]);
        let fcost: f64 = feasible
            .iter()
            .zip(cost.iter())
            .map(|(p, c)| p * c)
            .sum();
        assert!(obj <= fcost + 1e-12);
        assert!((obj - fcost).abs() < 1e-12, "that plan happens to be optimal");
    }

    #[test]
    fn degenerate_uniform_instance_terminates() {
        // Highly degenerate: equal weights, symmetric costs.
        let n = 40;
        let mut cost = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                cost[[i, j]] = ((i as f64 - j as f64).abs()).powi(2);
            }
        }
        let w = vec![1.0 / n as f64; n];
        let (plan, obj) = solve(&cost, &w, &w).unwrap();
        assert!(obj.abs() < 1e-12, "identity matching is optimal");
        for i in 0..n {
            assert!((plan[[i, i]] - 1.0 / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_mass_rows_allowed() {
        let cost = arr2(&[[1.0, 5.0], [2.0, 1.0], [3.0, 3.0]]);
        let (plan, _) = solve(&cost, &[0.5, 0.0, 0.5], &[0.5, 0.5]).unwrap();
        let row1: f64 = (0..2).map(|j| plan[[1, j]]).sum();
        assert_eq!(row1, 0.0);
    }

    #[test]
    fn marginal_mismatch_rejected() {
        let cost = arr2(&[[1.0]]);
        assert!(matches!(
            solve(&cost, &[1.0], &[0.5]),
            Err(Error::MarginalMismatch { .. })
        ));
    }
}
