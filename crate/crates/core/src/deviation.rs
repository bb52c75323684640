//! Fréchet variance and p-deviation fields.
//!
//! The deviation field of a space `(V, d_V, ω)` under a pseudo-metric θ is
//! `σ_p(v) = (Σ_{v'} θ^p(v, v') ω(v'))^{1/p}`. θ is either the base metric, a
//! diffusion pseudo-metric `θ(i,j) = (Σ_z |k(i,z) - k(j,z)|^q ν(z))^{1/q}`
//! built from a kernel matrix and a discrete reference measure ν, or the
//! closed-form heat-kernel diffusion distance on R^d,
//! `θ_t²(x,y) = 2((8πt)^{-d/2} - k_{2t}(x,y))`.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::mmspace::MetricMeasureSpace;
use crate::{Error, Result};

/// Choice of pseudo-metric for deviation fields.
#[derive(Debug, Clone)]
pub enum PseudoMetricSpec {
    /// θ = the base metric of the space.
    Base,
    /// Diffusion distance from an explicit kernel matrix and reference
    /// measure. `ref_weights` of `None` means the uniform vertex measure.
    KernelMatrix {
        q: f64,
        kernel: Array2<f64>,
        ref_weights: Option<Array1<f64>>,
    },
    /// Closed-form heat-kernel diffusion distance on R^d at scale `t`
    /// (L² norm against Lebesgue measure); requires stored coordinates.
    HeatRd { t: f64 },
}

/// Tag recorded in field JSON output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaKind {
    Base,
    Kernel,
    Heat,
}

impl PseudoMetricSpec {
    pub fn kind(&self) -> ThetaKind {
        match self {
            PseudoMetricSpec::Base => ThetaKind::Base,
            PseudoMetricSpec::KernelMatrix { .. } => ThetaKind::Kernel,
            PseudoMetricSpec::HeatRd { .. } => ThetaKind::Heat,
        }
    }
}

/// The Euclidean heat kernel `k_t(x, y)` on R^d.
pub fn heat_kernel(t: f64, d: usize, x: &[f64], y: &[f64]) -> f64 {
    let sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    (4.0 * PI * t).powf(-(d as f64) / 2.0) * (-sq / (4.0 * t)).exp()
}

/// Materialize the n×n pseudo-metric matrix for a space.
pub fn materialize_theta(
    space: &MetricMeasureSpace,
    pm: &PseudoMetricSpec,
) -> Result<Array2<f64>> {
    let n = space.n;
    match pm {
        PseudoMetricSpec::Base => Ok(space.dist.clone()),
        PseudoMetricSpec::KernelMatrix {
            q,
            kernel,
            ref_weights,
        } => {
            if *q < 1.0 {
                return Err(Error::InvalidNormOrder(*q));
            }
            if kernel.nrows() != n || kernel.ncols() != n {
                return Err(Error::MatrixShape {
                    rows: kernel.nrows(),
                    cols: kernel.ncols(),
                    expected_rows: n,
                    expected_cols: n,
                });
            }
            for i in 0..n {
                for j in 0..n {
                    let k = kernel[[i, j]];
                    if k < 0.0 || (k - kernel[[j, i]]).abs() > 1e-12 {
                        return Err(Error::InvalidInput(format!(
                            "kernel must be symmetric and nonnegative (entry [{i}][{j}])"
                        )));
                    }
                }
            }
            let nu = match ref_weights {
                Some(w) => {
                    if w.len() != n {
                        return Err(Error::WeightLength {
                            expected: n,
                            got: w.len(),
                        });
                    }
                    if let Some((i, &v)) = w.iter().enumerate().find(|(_, &v)| v < 0.0) {
                        return Err(Error::NegativeWeight { index: i, value: v });
                    }
                    w.clone()
                }
                None => Array1::from_elem(n, 1.0 / n as f64),
            };
            let mut theta = Array2::zeros((n, n));
            for i in 0..n {
                for j in (i + 1)..n {
                    let mut acc = 0.0;
                    for z in 0..n {
                        acc += (kernel[[i, z]] - kernel[[j, z]]).abs().powf(*q) * nu[z];
                    }
                    let v = acc.powf(1.0 / *q);
                    theta[[i, j]] = v;
                    theta[[j, i]] = v;
                }
            }
            Ok(theta)
        }
        PseudoMetricSpec::HeatRd { t } => {
            if *t <= 0.0 {
                return Err(Error::InvalidScale(*t));
            }
            let coords = space.coords.as_ref().ok_or_else(|| Error::MissingThetaInput {
                kind: "heat".into(),
                what: "stored coordinates".into(),
            })?;
            let d = coords[0].len();
            let self_mass = (8.0 * PI * t).powf(-(d as f64) / 2.0);
            let mut theta = Array2::zeros((n, n));
            for i in 0..n {
                for j in (i + 1)..n {
                    let k2t = heat_kernel(2.0 * t, d, &coords[i], &coords[j]);
                    let v = (2.0 * (self_mass - k2t)).max(0.0).sqrt();
                    theta[[i, j]] = v;
                    theta[[j, i]] = v;
                }
            }
            Ok(theta)
        }
    }
}

/// A materialized deviation field over a space.
#[derive(Debug, Clone)]
pub struct DeviationField {
    pub p: f64,
    /// σ_p per vertex.
    pub values: Array1<f64>,
    /// The pseudo-metric matrix the field was computed against.
    pub theta: Array2<f64>,
    pub theta_kind: ThetaKind,
}

/// Compute the p-deviation field of a space under a pseudo-metric.
pub fn deviation_field(
    space: &MetricMeasureSpace,
    p: f64,
    pm: &PseudoMetricSpec,
) -> Result<DeviationField> {
    if p < 1.0 {
        return Err(Error::InvalidOrder(p));
    }
    let theta = materialize_theta(space, pm)?;
    let values = field_values(&theta, &space.weights, p);
    Ok(DeviationField {
        p,
        values,
        theta,
        theta_kind: pm.kind(),
    })
}

/// σ_p of a weighted support set, evaluated at arbitrary points of a built-in
/// metric space (the evaluation points need not carry mass).
pub fn field_at_points(
    metric: &crate::mmspace::MetricId,
    eval: &[Vec<f64>],
    support: &[Vec<f64>],
    weights: &[f64],
    p: f64,
) -> Result<Vec<f64>> {
    if p < 1.0 {
        return Err(Error::InvalidOrder(p));
    }
    if support.len() != weights.len() {
        return Err(Error::WeightLength {
            expected: support.len(),
            got: weights.len(),
        });
    }
    let mut out = Vec::with_capacity(eval.len());
    for x in eval {
        let mut acc = 0.0;
        for (s, &w) in support.iter().zip(weights) {
            if w > 0.0 {
                acc += metric.distance(x, s)?.powf(p) * w;
            }
        }
        out.push(acc.powf(1.0 / p));
    }
    Ok(out)
}

/// σ_p values for an explicit theta matrix and weight vector.
pub fn field_values(theta: &Array2<f64>, weights: &Array1<f64>, p: f64) -> Array1<f64> {
    let n = theta.nrows();
    let mut values = Array1::zeros(n);
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            let w = weights[j];
            if w > 0.0 {
                acc += theta[[i, j]].powf(p) * w;
            }
        }
        values[i] = acc.powf(1.0 / p);
    }
    values
}

impl DeviationField {
    /// Verify the 1-Lipschitz property |σ_p(i) - σ_p(j)| ≤ θ(i,j) + tol on all pairs.
    pub fn check_lipschitz(&self, tol: f64) -> Result<()> {
        let n = self.values.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let gap = (self.values[i] - self.values[j]).abs();
                if gap > self.theta[[i, j]] + tol {
                    return Err(Error::InvalidInput(format!(
                        "deviation not 1-Lipschitz at ({i},{j}): |Δσ| = {gap}, θ = {}",
                        self.theta[[i, j]]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Empirical admissibility constant of θ relative to the base metric, plus the
/// analytic bound when one is known (heat kernel on R^d).
#[derive(Debug, Clone, Copy)]
pub struct Admissibility {
    /// max over i≠j of θ(i,j) / d(i,j).
    pub empirical: f64,
    /// Analytic Lipschitz bound, when available.
    pub analytic: Option<f64>,
}

/// The closed-form admissibility constant of the heat diffusion distance on
/// R^d at scale t: `L_t = 1 / (sqrt(2t) (8πt)^{d/4})`.
pub fn heat_admissibility_bound(t: f64, d: usize) -> f64 {
    1.0 / ((2.0 * t).sqrt() * (8.0 * PI * t).powf(d as f64 / 4.0))
}

/// Estimate the admissibility constant of a pseudo-metric on a space.
///
/// Errors when θ(i,j) > 0 on a pair at base distance zero: such a θ is not
/// admissible relative to this sample.
pub fn admissibility_constant(
    space: &MetricMeasureSpace,
    pm: &PseudoMetricSpec,
) -> Result<Admissibility> {
    let theta = materialize_theta(space, pm)?;
    let n = space.n;
    let mut ratio = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = space.dist[[i, j]];
            let t = theta[[i, j]];
            if d == 0.0 {
                if t > 0.0 {
                    return Err(Error::NotAdmissible { i, j, theta: t });
                }
                continue;
            }
            ratio = ratio.max(t / d);
        }
    }
    let analytic = match pm {
        PseudoMetricSpec::HeatRd { t } => {
            let d = space
                .coords
                .as_ref()
                .map(|c| c[0].len())
                .unwrap_or(1);
            Some(heat_admissibility_bound(*t, d))
        }
        _ => None,
    };
    Ok(Admissibility {
        empirical: ratio,
        analytic,
    })
}

/// Outcome of the mode/KDE correspondence check: grid minimizers of the
/// Fréchet variance `V_{2,t/2}` under the heat diffusion distance, and grid
/// maximizers of the Gaussian kernel density estimate at scale t. The two
/// index sets must coincide, since `V_{2,t/2}` is an affine flip of the KDE.
#[derive(Debug, Clone)]
pub struct KdeCheck {
    pub grid: Vec<f64>,
    pub variance_argmin: Vec<usize>,
    pub kde_argmax: Vec<usize>,
}

/// Run the correspondence check for a one-dimensional sample on a uniform grid
/// of `grid_size` points covering the sample range (padded by 3·sqrt(2t)).
pub fn kde_variance_check(points: &[f64], t: f64, grid_size: usize) -> Result<KdeCheck> {
    if points.is_empty() {
        return Err(Error::EmptySample);
    }
    if t <= 0.0 {
        return Err(Error::InvalidScale(t));
    }
    let lo = points.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = points.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pad = 3.0 * (2.0 * t).sqrt();
    let (lo, hi) = (lo - pad, hi + pad);
    let m = grid_size.max(2);
    let grid: Vec<f64> = (0..m)
        .map(|k| lo + (hi - lo) * k as f64 / (m - 1) as f64)
        .collect();

    // Variance route: grid vertices carry zero mass, samples carry 1/n; the
    // deviation field at the grid vertices is then V_{2,t/2}^{1/2} against the
    // sample measure.
    let n = points.len();
    let mut coords: Vec<Vec<f64>> = grid.iter().map(|&x| vec![x]).collect();
    coords.extend(points.iter().map(|&x| vec![x]));
    let mut weights = vec![0.0; m];
    weights.extend(std::iter::repeat(1.0 / n as f64).take(n));
    let space = MetricMeasureSpace::build(
        coords,
        crate::mmspace::MetricId::Euclidean { dim: 1 },
        Some(weights),
    )?;
    let field = deviation_field(&space, 2.0, &PseudoMetricSpec::HeatRd { t: t / 2.0 })?;
    let sigma = &field.values.as_slice().unwrap()[..m];
    let min = sigma.iter().cloned().fold(f64::INFINITY, f64::min);
    let variance_argmin: Vec<usize> = (0..m).filter(|&k| sigma[k] == min).collect();

    // KDE route: u(t, x) = mean of heat kernels at scale t.
    let kde: Vec<f64> = grid
        .iter()
        .map(|&x| {
            points
                .iter()
                .map(|&y| heat_kernel(t, 1, &[x], &[y]))
                .sum::<f64>()
                / n as f64
        })
        .collect();
    let max = kde.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let kde_argmax: Vec<usize> = (0..m).filter(|&k| kde[k] == max).collect();

    Ok(KdeCheck {
        grid,
        variance_argmin,
        kde_argmax,
    })
}

/// On-disk JSON schema for a deviation field.
#[derive(Debug, Serialize, Deserialize)]
pub struct FieldJson {
    pub p: f64,
    pub values: Vec<f64>,
    pub theta_kind: ThetaKind,
}

impl DeviationField {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&FieldJson {
            p: self.p,
            values: self.values.to_vec(),
            theta_kind: self.theta_kind,
        })?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mmspace::{circle_grid, MetricId};

    fn dirac_circle_space(n: usize, mu1: f64) -> MetricMeasureSpace {
        let mut weights = vec![0.0; n];
        weights[0] = mu1;
        weights[n / 2] = 1.0 - mu1;
        MetricMeasureSpace::build(circle_grid(n), MetricId::CircleGeodesic, Some(weights))
            .unwrap()
    }

    #[test]
    fn base_theta_is_dist() {
        let space = dirac_circle_space(8, 0.5);
        let theta = materialize_theta(&space, &PseudoMetricSpec::Base).unwrap();
        assert_eq!(theta, space.dist);
    }

    #[test]
    fn heat_theta_zero_on_diagonal() {
        let space = MetricMeasureSpace::build(
            vec![vec![0.0], vec![1.0], vec![0.0]],
            MetricId::Euclidean { dim: 1 },
            None,
        )
        .unwrap();
        let theta = materialize_theta(&space, &PseudoMetricSpec::HeatRd { t: 0.25 }).unwrap();
        assert_eq!(theta[[0, 0]], 0.0);
        // Identical coordinates at distinct indices also sit at θ = 0.
        assert!(theta[[0, 2]].abs() < 1e-15);
    }

    #[test]
    fn heat_theta_closed_form_value() {
        // d = 1, t = 0.25, x = 0, y = 1:
        // θ = sqrt(2((2π)^{-1/2} - (2π)^{-1/2} e^{-1/2})).
        let space = MetricMeasureSpace::build(
            vec![vec![0.0], vec![1.0]],
            MetricId::Euclidean { dim: 1 },
            None,
        )
        .unwrap();
        let theta = materialize_theta(&space, &PseudoMetricSpec::HeatRd { t: 0.25 }).unwrap();
        let c = (2.0 * PI).powf(-0.5);
        let expected = (2.0 * (c - c * (-0.5f64).exp())).sqrt();
        assert!((theta[[0, 1]] - expected).abs() < 1e-14);
    }

    #[test]
    fn median_field_closed_form() {
        // σ₁(φ) = (μ₁ - μ₂)φ + μ₂π on [0, π] for the two-Dirac circle measure.
        let n = 720;
        for &mu1 in &[0.3, 0.45, 0.6] {
            let mu2 = 1.0 - mu1;
            let space = dirac_circle_space(n, mu1);
            let field = deviation_field(&space, 1.0, &PseudoMetricSpec::Base).unwrap();
            for k in 0..=n / 2 {
                let phi = 2.0 * PI * k as f64 / n as f64;
                let expected = (mu1 - mu2) * phi + mu2 * PI;
                assert!(
                    (field.values[k] - expected).abs() < 1e-12,
                    "mu1={mu1} phi={phi}"
                );
            }
        }
    }

    #[test]
    fn median_field_constant_at_half() {
        let space = dirac_circle_space(720, 0.5);
        let field = deviation_field(&space, 1.0, &PseudoMetricSpec::Base).unwrap();
        for &v in field.values.iter() {
            assert!((v - PI / 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn single_dirac_field_is_theta_slice() {
        let mut weights = vec![0.0; 16];
        weights[5] = 1.0;
        let space = MetricMeasureSpace::build(
            circle_grid(16),
            MetricId::CircleGeodesic,
            Some(weights),
        )
        .unwrap();
        for &p in &[1.0, 2.0, 3.5] {
            let field = deviation_field(&space, p, &PseudoMetricSpec::Base).unwrap();
            for i in 0..16 {
                assert!((field.values[i] - space.dist[[i, 5]]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn order_below_one_rejected() {
        let space = dirac_circle_space(8, 0.5);
        assert!(matches!(
            deviation_field(&space, 0.5, &PseudoMetricSpec::Base),
            Err(Error::InvalidOrder(_))
        ));
    }

    #[test]
    fn lipschitz_property_holds() {
        let space = dirac_circle_space(64, 0.37);
        for &p in &[1.0, 2.0, 3.0] {
            let field = deviation_field(&space, p, &PseudoMetricSpec::Base).unwrap();
            field.check_lipschitz(1e-9).unwrap();
        }
    }

    #[test]
    fn monotone_scaling_of_theta() {
        // Replacing θ by c·θ scales σ_p by exactly c and keeps the argmin set.
        let space = dirac_circle_space(32, 0.4);
        let field = deviation_field(&space, 2.0, &PseudoMetricSpec::Base).unwrap();
        let c = 3.5;
        let scaled = field_values(&space.dist.mapv(|d| c * d), &space.weights, 2.0);
        let argmin = |vals: &[f64]| {
            let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            (0..vals.len())
                .filter(|&i| (vals[i] - min).abs() < 1e-12)
                .collect::<Vec<_>>()
        };
        for i in 0..space.n {
            assert!((scaled[i] - c * field.values[i]).abs() < 1e-9 * c);
        }
        assert_eq!(
            argmin(field.values.as_slice().unwrap()),
            argmin(scaled.as_slice().unwrap())
        );
    }

    #[test]
    fn base_admissibility_is_one() {
        let space = dirac_circle_space(16, 0.5);
        let adm = admissibility_constant(&space, &PseudoMetricSpec::Base).unwrap();
        assert!((adm.empirical - 1.0).abs() < 1e-12);
        assert!(adm.analytic.is_none());
    }

    #[test]
    fn heat_admissibility_respects_analytic_bound() {
        // Deterministic scattered 1-D points.
        let pts: Vec<Vec<f64>> = (0..60)
            .map(|k| vec![(k as f64 * 0.718).sin() * 3.0 + 0.01 * k as f64])
            .collect();
        let space =
            MetricMeasureSpace::build(pts, MetricId::Euclidean { dim: 1 }, None).unwrap();
        for &t in &[0.1, 0.5, 2.0] {
            let adm =
                admissibility_constant(&space, &PseudoMetricSpec::HeatRd { t }).unwrap();
            let bound = adm.analytic.unwrap();
            assert!(
                adm.empirical <= bound + 1e-9,
                "t={t}: {} > {}",
                adm.empirical,
                bound
            );
        }
        // And the closed form itself: t = 0.5, d = 1 → 1/(√1 · (4π)^{1/4}).
        let l = heat_admissibility_bound(0.5, 1);
        assert!((l - 1.0 / (4.0 * PI).powf(0.25)).abs() < 1e-14);
    }

    #[test]
    fn kernel_admissibility_matches_grid_oracle() {
        // exp(-c d²) kernel on the circle with uniform ν; the empirical L must
        // equal the max ratio found by dense search over all pairs.
        let n = 100;
        let space =
            MetricMeasureSpace::build(circle_grid(n), MetricId::CircleGeodesic, None).unwrap();
        let c = 2.0;
        let kernel = space.dist.mapv(|d| (-c * d * d).exp());
        let pm = PseudoMetricSpec::KernelMatrix {
            q: 2.0,
            kernel: kernel.clone(),
            ref_weights: None,
        };
        let adm = admissibility_constant(&space, &pm).unwrap();
        assert!(adm.empirical.is_finite());
        // Independent dense maximizer over all ~10^4 pairs.
        let theta = materialize_theta(&space, &pm).unwrap();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if space.dist[[i, j]] > 0.0 {
                    best = best.max(theta[[i, j]] / space.dist[[i, j]]);
                }
            }
        }
        assert!((adm.empirical - best).abs() < 1e-12);
    }

    #[test]
    fn diffusion_theta_is_pseudo_metric() {
        let n = 40;
        let space =
            MetricMeasureSpace::build(circle_grid(n), MetricId::CircleGeodesic, None).unwrap();
        let kernel = space.dist.mapv(|d| (-3.0 * d * d).exp());
        let theta = materialize_theta(
            &space,
            &PseudoMetricSpec::KernelMatrix {
                q: 2.0,
                kernel,
                ref_weights: None,
            },
        )
        .unwrap();
        for i in 0..n {
            assert_eq!(theta[[i, i]], 0.0);
            for j in 0..n {
                assert!(theta[[i, j]] >= 0.0);
                assert_eq!(theta[[i, j]], theta[[j, i]]);
                for k in 0..n {
                    assert!(theta[[i, j]] <= theta[[i, k]] + theta[[k, j]] + 1e-9);
                }
            }
        }
    }

    #[test]
    fn kde_check_single_point() {
        let out = kde_variance_check(&[0.0], 0.3, 501).unwrap();
        assert_eq!(out.variance_argmin, out.kde_argmax);
        let idx = out.kde_argmax[0];
        // Grid point nearest 0 wins.
        let best = (0..out.grid.len())
            .min_by(|&a, &b| {
                out.grid[a]
                    .abs()
                    .partial_cmp(&out.grid[b].abs())
                    .unwrap()
            })
            .unwrap();
        assert_eq!(idx, best);
    }

    #[test]
    fn kde_check_symmetric_pair_large_t() {
        let out = kde_variance_check(&[-1.0, 1.0], 4.0, 801).unwrap();
        assert_eq!(out.variance_argmin, out.kde_argmax);
        let idx = out.kde_argmax[0];
        let best = (0..out.grid.len())
            .min_by(|&a, &b| {
                out.grid[a]
                    .abs()
                    .partial_cmp(&out.grid[b].abs())
                    .unwrap()
            })
            .unwrap();
        assert_eq!(idx, best);
    }

    #[test]
    fn kde_check_mixture_draws() {
        use crate::mmspace::{sample, Distribution, SamplerSpec, SpaceKind};
        let (pts, _) = sample(&SamplerSpec {
            space: SpaceKind::EuclideanRd(1),
            distribution: Distribution::GaussMix1d(vec![(0.5, -1.5, 0.4), (0.5, 1.2, 0.3)]),
            seed: 17,
            n: 200,
        })
        .unwrap();
        let xs: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        let out = kde_variance_check(&xs, 0.05, 600).unwrap();
        assert_eq!(out.variance_argmin, out.kde_argmax);
    }

    #[test]
    fn empty_sample_rejected() {
        assert!(matches!(
            kde_variance_check(&[], 0.1, 100),
            Err(Error::EmptySample)
        ));
    }
}
