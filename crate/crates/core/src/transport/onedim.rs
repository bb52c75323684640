//! Exact one-dimensional Wasserstein distance by quantile coupling.

use crate::{Error, Result};

/// Exact w_p between two weighted point sets on the real line, by merging the
/// sorted cumulative distributions.
pub fn wasserstein_1d(
    values_a: &[f64],
    weights_a: &[f64],
    values_b: &[f64],
    weights_b: &[f64],
    p: f64,
) -> Result<f64> {
    if values_a.len() != weights_a.len() || values_b.len() != weights_b.len() {
        return Err(Error::WeightLength {
            expected: values_a.len(),
            got: weights_a.len(),
        });
    }
    if values_a.is_empty() || values_b.is_empty() {
        return Err(Error::EmptySample);
    }
    if p < 1.0 {
        return Err(Error::InvalidOrder(p));
    }
    let sum_a: f64 = weights_a.iter().sum();
    let sum_b: f64 = weights_b.iter().sum();
    if (sum_a - 1.0).abs() > 1e-8 || (sum_b - 1.0).abs() > 1e-8 {
        return Err(Error::MarginalMismatch {
            source_sum: sum_a,
            target_sum: sum_b,
        });
    }

    let mut order_a: Vec<usize> = (0..values_a.len()).collect();
    order_a.sort_by(|&x, &y| values_a[x].partial_cmp(&values_a[y]).unwrap());
    let mut order_b: Vec<usize> = (0..values_b.len()).collect();
    order_b.sort_by(|&x, &y| values_b[x].partial_cmp(&values_b[y]).unwrap());

    let mut ia = 0;
    let mut ib = 0;
    let mut rem_a = weights_a[order_a[0]];
    let mut rem_b = weights_b[order_b[0]];
    let mut acc = 0.0f64;
    loop {
        // Skip zero-mass atoms.
        while rem_a <= 0.0 {
            ia += 1;
            if ia == order_a.len() {
                return Ok(acc.powf(1.0 / p));
            }
            rem_a = weights_a[order_a[ia]];
        }
        while rem_b <= 0.0 {
            ib += 1;
            if ib == order_b.len() {
                return Ok(acc.powf(1.0 / p));
            }
            rem_b = weights_b[order_b[ib]];
        }
        let dm = rem_a.min(rem_b);
        let gap = (values_a[order_a[ia]] - values_b[order_b[ib]]).abs();
        acc += gap.powf(p) * dm;
        rem_a -= dm;
        rem_b -= dm;
    }
}
