//! Log-domain Sinkhorn iterations for entropic optimal transport.
//!
//! Small regularizations converge slowly from a cold start, so the solver
//! warms up through a geometric ε-schedule before iterating at the target ε
//! (potentials carry over between levels). Convergence means the max absolute
//! marginal violation drops below the tolerance; the converged plan is then
//! rounded onto the marginal polytope so its row and column sums match the
//! inputs to float precision.

use ndarray::Array2;

use crate::{Error, Result};

/// Iteration cap for Sinkhorn runs.
pub const SINKHORN_MAX_ITER: usize = 10_000;
/// Target max marginal violation.
pub const SINKHORN_TOL: f64 = 1e-8;
/// Warmup iterations per ε level.
const WARMUP_ITERS: usize = 100;
/// ε decay factor between warmup levels.
const WARMUP_DECAY: f64 = 0.5;

/// Default entropic regularization: 1e-3 times the median cost entry.
pub fn default_epsilon(cost: &Array2<f64>) -> f64 {
    let mut entries: Vec<f64> = cost.iter().copied().collect();
    entries.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = entries[entries.len() / 2];
    let fallback = entries.last().copied().unwrap_or(1.0) * 1e-3;
    let eps = 1e-3 * median;
    if eps > 0.0 {
        eps
    } else if fallback > 0.0 {
        fallback
    } else {
        1e-9
    }
}

fn logsumexp(acc: &[f64]) -> f64 {
    let max = acc.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = acc.iter().map(|&x| (x - max).exp()).sum();
    max + sum.ln()
}

/// Outcome of a Sinkhorn run. `marginal_error` is the residual of the raw
/// iterate; the returned plan itself has been projected onto the marginal
/// polytope and satisfies the constraints to float precision.
#[derive(Debug, Clone)]
pub struct SinkhornRun {
    pub plan: Array2<f64>,
    pub iterations: usize,
    pub marginal_error: f64,
}

/// Entropically regularized transport plan between `a` and `b` for the given
/// cost matrix. Returns the plan and the iteration count.
///
/// Errors with [`Error::SinkhornNonConvergence`] when the marginal violation
/// does not reach `tol` within `max_iter` iterations: non-convergence is
/// reported, never silently accepted.
pub fn sinkhorn_plan(
    cost: &Array2<f64>,
    a: &[f64],
    b: &[f64],
    epsilon: f64,
    max_iter: usize,
    tol: f64,
) -> Result<(Array2<f64>, usize)> {
    let run = sinkhorn_run(cost, a, b, epsilon, max_iter, tol)?;
    if run.marginal_error >= tol {
        return Err(Error::SinkhornNonConvergence {
            iterations: run.iterations,
            target: tol,
            achieved: run.marginal_error,
        });
    }
    Ok((run.plan, run.iterations))
}

/// Best-effort Sinkhorn: always returns the (polished, feasible) plan reached
/// within the budget together with the raw residual, letting callers that
/// only need a feasible search direction proceed while still seeing the
/// convergence quality.
pub fn sinkhorn_run(
    cost: &Array2<f64>,
    a: &[f64],
    b: &[f64],
    epsilon: f64,
    max_iter: usize,
    tol: f64,
) -> Result<SinkhornRun> {
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
    let log_a: Vec<f64> = a
        .iter()
        .map(|&x| if x > 0.0 { x.ln() } else { f64::NEG_INFINITY })
        .collect();
    let log_b: Vec<f64> = b
        .iter()
        .map(|&x| if x > 0.0 { x.ln() } else { f64::NEG_INFINITY })
        .collect();
    let mut f = vec![0.0f64; m];
    let mut g = vec![0.0f64; n];
    let mut acc = vec![0.0f64; m.max(n)];

    let round = |f: &[f64], g: &[f64], eps: f64| -> Array2<f64> {
        let mut plan = Array2::zeros((m, n));
        for i in 0..m {
            for j in 0..n {
                plan[[i, j]] = ((f[i] + g[j] - cost[[i, j]]) / eps).exp();
            }
        }
        plan
    };
    let marginal_err = |plan: &Array2<f64>| -> f64 {
        let mut err = 0.0f64;
        for i in 0..m {
            let row: f64 = (0..n).map(|j| plan[[i, j]]).sum();
            err = err.max((row - a[i]).abs());
        }
        for j in 0..n {
            let col: f64 = (0..m).map(|i| plan[[i, j]]).sum();
            err = err.max((col - b[j]).abs());
        }
        err
    };

    let sweep = |f: &mut [f64], g: &mut [f64], eps: f64, acc: &mut Vec<f64>| {
        for j in 0..n {
            if log_b[j] == f64::NEG_INFINITY {
                g[j] = f64::NEG_INFINITY;
                continue;
            }
            acc.clear();
            for i in 0..m {
                acc.push((f[i] - cost[[i, j]]) / eps);
            }
            g[j] = eps * (log_b[j] - logsumexp(acc));
        }
        for i in 0..m {
            if log_a[i] == f64::NEG_INFINITY {
                f[i] = f64::NEG_INFINITY;
                continue;
            }
            acc.clear();
            for j in 0..n {
                acc.push((g[j] - cost[[i, j]]) / eps);
            }
            f[i] = eps * (log_a[i] - logsumexp(acc));
        }
    };

    let mut used = 0usize;
    // Warmup schedule, only when the budget leaves room for it.
    if max_iter >= 4 * WARMUP_ITERS {
        let top = cost.iter().fold(0.0f64, |m, &c| m.max(c.abs()));
        let mut levels = Vec::new();
        let mut e = top * 0.5;
        while e > epsilon * (1.0 / WARMUP_DECAY) && levels.len() < 30 {
            levels.push(e);
            e *= WARMUP_DECAY;
        }
        let budget = (max_iter / 2) / WARMUP_ITERS.max(1);
        for &eps_level in levels.iter().rev().take(budget).rev() {
            for _ in 0..WARMUP_ITERS {
                sweep(&mut f, &mut g, eps_level, &mut acc);
                used += 1;
            }
        }
    }

    while used < max_iter {
        sweep(&mut f, &mut g, epsilon, &mut acc);
        used += 1;
        if used % 5 == 0 || used == max_iter {
            let plan = round(&f, &g, epsilon);
            let achieved = marginal_err(&plan);
            if achieved < tol {
                return Ok(SinkhornRun {
                    plan: polish_marginals(plan, a, b),
                    iterations: used,
                    marginal_error: achieved,
                });
            }
        }
    }
    let plan = round(&f, &g, epsilon);
    let achieved = marginal_err(&plan);
    Ok(SinkhornRun {
        plan: polish_marginals(plan, a, b),
        iterations: max_iter,
        marginal_error: achieved,
    })
}

/// Project a near-feasible plan onto the marginal polytope: scale rows and
/// columns down where they overshoot, then spread the residual mass as a
/// rank-one correction. Keeps entries nonnegative and makes the marginals
/// exact to float precision.
fn polish_marginals(mut plan: Array2<f64>, a: &[f64], b: &[f64]) -> Array2<f64> {
    let m = a.len();
    let n = b.len();
    for i in 0..m {
        let row: f64 = (0..n).map(|j| plan[[i, j]]).sum();
        if row > a[i] && row > 0.0 {
            let scale = a[i] / row;
            for j in 0..n {
                plan[[i, j]] *= scale;
            }
        }
    }
    for j in 0..n {
        let col: f64 = (0..m).map(|i| plan[[i, j]]).sum();
        if col > b[j] && col > 0.0 {
            let scale = b[j] / col;
            for i in 0..m {
                plan[[i, j]] *= scale;
            }
        }
    }
    let mut miss_a = vec![0.0f64; m];
    let mut miss_b = vec![0.0f64; n];
    for i in 0..m {
        let row: f64 = (0..n).map(|j| plan[[i, j]]).sum();
        miss_a[i] = (a[i] - row).max(0.0);
    }
    for j in 0..n {
        let col: f64 = (0..m).map(|i| plan[[i, j]]).sum();
        miss_b[j] = (b[j] - col).max(0.0);
    }
    let total: f64 = miss_a.iter().sum();
    if total > 0.0 {
        for i in 0..m {
            if miss_a[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                plan[[i, j]] += miss_a[i] * miss_b[j] / total;
            }
        }
    }
    plan
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    #[test]
    fn matches_exact_on_small_instance() {
        let cost = arr2(&[[0.0, 1.0, 4.0], [1.0, 0.0, 1.0], [4.0, 1.0, 0.0]]);
        let a = [0.3, 0.4, 0.3];
        let b = [0.25, 0.5, 0.25];
        let eps = default_epsilon(&cost);
        let (plan, _) =
            sinkhorn_plan(&cost, &a, &b, eps, SINKHORN_MAX_ITER, SINKHORN_TOL).unwrap();
        let entropic: f64 = plan.iter().zip(cost.iter()).map(|(p, c)| p * c).sum();
        let (_, exact) = super::super::netsimplex::solve(&cost, &a, &b).unwrap();
        assert!(entropic >= exact - 1e-9);
        assert!(entropic <= exact + 5.0 * eps * (3.0f64).ln().max(1.0));
        for i in 0..3 {
            let row: f64 = (0..3).map(|j| plan[[i, j]]).sum();
            assert!((row - a[i]).abs() < SINKHORN_TOL);
        }
        for j in 0..3 {
            let col: f64 = (0..3).map(|i| plan[[i, j]]).sum();
            assert!((col - b[j]).abs() < SINKHORN_TOL);
        }
    }

    #[test]
    fn zero_mass_row_stays_empty() {
        let cost = arr2(&[[0.0, 1.0], [1.0, 0.0]]);
        let (plan, _) =
            sinkhorn_plan(&cost, &[1.0, 0.0], &[0.5, 0.5], 1e-2, SINKHORN_MAX_ITER, 1e-8).unwrap();
        assert_eq!(plan[[1, 0]], 0.0);
        assert_eq!(plan[[1, 1]], 0.0);
    }

    #[test]
    fn non_convergence_is_reported() {
        // One iteration at a smeary ε cannot satisfy a 1e-12 tolerance.
        let cost = arr2(&[[0.0, 1.0], [1.0, 0.0]]);
        let err = sinkhorn_plan(&cost, &[0.9, 0.1], &[0.5, 0.5], 0.5, 1, 1e-12).unwrap_err();
        assert!(matches!(err, Error::SinkhornNonConvergence { .. }));
    }
}
