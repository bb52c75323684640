//! Finite metric-measure spaces `(V, d_V, ω)`.
//!
//! Distance matrices are stored densely; all downstream operations need
//! all-pairs values. Instances are immutable after construction and safe to
//! share between threads.

pub mod metrics;
pub mod sampler;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use metrics::{
    circle_geodesic, euclidean, grassmann_geodesic, sphere2_geodesic, wrap_angle, Frame2, MetricId,
};
pub use sampler::{circle_grid, fibonacci_sphere, sample, Distribution, SamplerSpec, SpaceKind};

/// Absolute tolerance for floating comparisons on distances.
pub const DIST_TOL: f64 = 1e-9;
/// Tolerance on the total mass of a probability vector.
pub const MASS_TOL: f64 = 1e-12;

/// A finite metric-measure space: point set with pairwise distances and
/// probability weights.
#[derive(Debug, Clone)]
pub struct MetricMeasureSpace {
    pub n: usize,
    pub metric: MetricId,
    /// Symmetric n×n matrix of nonnegative distances, zero diagonal.
    pub dist: Array2<f64>,
    /// Nonnegative weights summing to 1.
    pub weights: Array1<f64>,
    pub labels: Option<Vec<String>>,
    /// Per-vertex coordinates, present for built-in spaces.
    pub coords: Option<Vec<Vec<f64>>>,
    /// Whether `dist` claims to satisfy the triangle inequality (vs. a pseudo-metric).
    pub is_metric: bool,
}

impl MetricMeasureSpace {
    /// Build a space from coordinates under a named built-in metric.
    ///
    /// `weights` of `None` means uniform `1/n`. Symmetry and a zero diagonal
    /// are enforced exactly by construction.
    pub fn build(
        points: Vec<Vec<f64>>,
        metric: MetricId,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput);
        }
        let n = points.len();
        if let Some(len) = metric.coord_len() {
            for (index, p) in points.iter().enumerate() {
                if p.len() != len {
                    return Err(Error::CoordDim {
                        index,
                        expected: len,
                        got: p.len(),
                    });
                }
            }
        } else {
            return Err(Error::UnknownMetric(metric.to_string()));
        }
        let weights = normalize_weights(n, weights)?;
        let mut dist = Array2::zeros((n, n));
        for i in 0..n {
            for j in (i + 1)..n {
                let d = metric.distance(&points[i], &points[j])?;
                dist[[i, j]] = d;
                dist[[j, i]] = d;
            }
        }
        Ok(MetricMeasureSpace {
            n,
            metric,
            dist,
            weights,
            labels: None,
            coords: Some(points),
            is_metric: true,
        })
    }

    /// Build a space from a precomputed distance matrix.
    pub fn from_dist(dist: Array2<f64>, weights: Option<Vec<f64>>, is_metric: bool) -> Result<Self> {
        let n = dist.nrows();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if dist.ncols() != n {
            return Err(Error::MatrixShape {
                rows: dist.nrows(),
                cols: dist.ncols(),
                expected_rows: n,
                expected_cols: n,
            });
        }
        let weights = normalize_weights(n, weights)?;
        // Symmetrize exactly and zero the diagonal, as the contract promises.
        let mut d = dist;
        for i in 0..n {
            d[[i, i]] = 0.0;
            for j in (i + 1)..n {
                let v = d[[i, j]];
                d[[j, i]] = v;
            }
        }
        Ok(MetricMeasureSpace {
            n,
            metric: MetricId::Precomputed,
            dist: d,
            weights,
            labels: None,
            coords: None,
            is_metric,
        })
    }

    /// Restrict the space to a subset of vertices, with fresh weights.
    pub fn restrict(&self, indices: &[usize], weights: Vec<f64>) -> Result<Self> {
        let m = indices.len();
        if m == 0 {
            return Err(Error::EmptyInput);
        }
        let mut dist = Array2::zeros((m, m));
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                dist[[a, b]] = self.dist[[i, j]];
            }
        }
        let coords = self
            .coords
            .as_ref()
            .map(|c| indices.iter().map(|&i| c[i].clone()).collect());
        let weights = normalize_weights(m, Some(weights))?;
        Ok(MetricMeasureSpace {
            n: m,
            metric: self.metric.clone(),
            dist,
            weights,
            labels: None,
            coords,
            is_metric: self.is_metric,
        })
    }

    /// Check the type invariants: zero diagonal, symmetry, nonnegativity,
    /// weight normalization, and (when `is_metric`) the triangle inequality on
    /// `triples` deterministically-seeded random triples.
    pub fn validate(&self, triples: usize) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            if self.dist[[i, i]] != 0.0 {
                return Err(Error::InvalidInput(format!("dist[{i}][{i}] != 0")));
            }
            for j in 0..n {
                let d = self.dist[[i, j]];
                if d < 0.0 {
                    return Err(Error::InvalidInput(format!("dist[{i}][{j}] = {d} < 0")));
                }
                if d != self.dist[[j, i]] {
                    return Err(Error::InvalidInput(format!("dist[{i}][{j}] asymmetric")));
                }
            }
        }
        let total: f64 = self.weights.sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::WeightSum(total));
        }
        for (i, &w) in self.weights.iter().enumerate() {
            if w < 0.0 {
                return Err(Error::NegativeWeight { index: i, value: w });
            }
        }
        if self.is_metric && n >= 3 {
            let mut state = 0x9E3779B97F4A7C15u64;
            let mut next = move |m: usize| {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                (state >> 33) as usize % m
            };
            for _ in 0..triples {
                let i = next(n);
                let j = next(n);
                let k = next(n);
                let lhs = self.dist[[i, j]];
                let rhs = self.dist[[i, k]] + self.dist[[k, j]];
                if lhs > rhs + DIST_TOL {
                    return Err(Error::InvalidInput(format!(
                        "triangle inequality fails on ({i},{j},{k}): {lhs} > {rhs}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn normalize_weights(n: usize, weights: Option<Vec<f64>>) -> Result<Array1<f64>> {
    match weights {
        None => Ok(Array1::from_elem(n, 1.0 / n as f64)),
        Some(w) => {
            if w.len() != n {
                return Err(Error::WeightLength {
                    expected: n,
                    got: w.len(),
                });
            }
            for (index, &value) in w.iter().enumerate() {
                if value < 0.0 {
                    return Err(Error::NegativeWeight { index, value });
                }
            }
            let total: f64 = w.iter().sum();
            if (total - 1.0).abs() > MASS_TOL {
                return Err(Error::WeightSum(total));
            }
            Ok(Array1::from_vec(w))
        }
    }
}

/// On-disk JSON schema for a space.
#[derive(Debug, Serialize, Deserialize)]
struct SpaceJson {
    n: usize,
    metric: String,
    dist: Vec<Vec<f64>>,
    weights: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    metadata: SpaceMetadata,
}

#[derive(Debug, Serialize, Deserialize)]
struct SpaceMetadata {
    metric: bool,
}

impl MetricMeasureSpace {
    pub fn to_json(&self) -> Result<String> {
        let doc = SpaceJson {
            n: self.n,
            metric: self.metric.to_string(),
            dist: self
                .dist
                .outer_iter()
                .map(|row| row.to_vec())
                .collect(),
            weights: self.weights.to_vec(),
            coords: self.coords.clone(),
            labels: self.labels.clone(),
            metadata: SpaceMetadata {
                metric: self.is_metric,
            },
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpaceJson = serde_json::from_str(text)?;
        let n = doc.n;
        if doc.dist.len() != n || doc.dist.iter().any(|row| row.len() != n) {
            return Err(Error::MatrixShape {
                rows: doc.dist.len(),
                cols: doc.dist.first().map_or(0, |r| r.len()),
                expected_rows: n,
                expected_cols: n,
            });
        }
        let metric: MetricId = doc.metric.parse()?;
        let mut dist = Array2::zeros((n, n));
        for (i, row) in doc.dist.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                dist[[i, j]] = v;
            }
        }
        let mut space = MetricMeasureSpace::from_dist(dist, Some(doc.weights), doc.metadata.metric)?;
        space.metric = metric;
        space.coords = doc.coords;
        space.labels = doc.labels;
        Ok(space)
    }

    /// Import a raw square distance matrix from header-free CSV.
    pub fn from_csv_dist(text: &str, is_metric: bool) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|f| f.trim().parse::<f64>()).collect();
            let row = row.map_err(|e| {
                Error::InvalidInput(format!("csv line {}: {e}", lineno + 1))
            })?;
            rows.push(row);
        }
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("csv matrix is not square".into()));
        }
        let mut dist = Array2::zeros((n, n));
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                dist[[i, j]] = v;
            }
        }
        MetricMeasureSpace::from_dist(dist, None, is_metric)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn antipodal_circle_points() {
        let space = MetricMeasureSpace::build(
            vec![vec![0.0], vec![PI]],
            MetricId::CircleGeodesic,
            None,
        )
        .unwrap();
        assert_eq!(space.dist[[0, 0]], 0.0);
        assert!((space.dist[[0, 1]] - PI).abs() < 1e-15);
        assert!((space.dist[[1, 0]] - PI).abs() < 1e-15);
    }

    #[test]
    fn identical_sphere_points() {
        let space = MetricMeasureSpace::build(
            vec![vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 1.0]],
            MetricId::Sphere2Geodesic,
            None,
        )
        .unwrap();
        assert_eq!(space.dist[[0, 1]], 0.0);
    }

    #[test]
    fn same_plane_different_bases_is_zero() {
        // Two bases of span{e1,e2} in R^4.
        let p0 = vec![1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0];
        let p1 = {
            let s = 0.5f64.sqrt();
            vec![s, s, 0.0, 0.0, s, -s, 0.0, 0.0]
        };
        let space = MetricMeasureSpace::build(
            vec![p0, p1],
            MetricId::Grassmann2 { ambient: 4 },
            None,
        )
        .unwrap();
        assert!(space.dist[[0, 1]] < 1e-7, "got {}", space.dist[[0, 1]]);
    }

    #[test]
    fn weight_errors() {
        let pts = vec![vec![0.0], vec![1.0]];
        let err = MetricMeasureSpace::build(
            pts.clone(),
            MetricId::CircleGeodesic,
            Some(vec![0.5]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::WeightLength { .. }));
        let err = MetricMeasureSpace::build(
            pts.clone(),
            MetricId::CircleGeodesic,
            Some(vec![1.5, -0.5]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NegativeWeight { .. }));
        let err =
            MetricMeasureSpace::build(pts, MetricId::CircleGeodesic, Some(vec![0.4, 0.4]))
                .unwrap_err();
        assert!(matches!(err, Error::WeightSum(_)));
    }

    #[test]
    fn unknown_metric_rejected() {
        assert!("hyperbolic".parse::<MetricId>().is_err());
    }

    #[test]
    fn builtin_metrics_are_metrics() {
        // Nonnegativity, symmetry, identity, triangle inequality on random triples.
        let angles: Vec<Vec<f64>> = (0..40).map(|k| vec![0.157 * k as f64]).collect();
        let space =
            MetricMeasureSpace::build(angles, MetricId::CircleGeodesic, None).unwrap();
        space.validate(2000).unwrap();

        let sph: Vec<Vec<f64>> = (0..30)
            .map(|k| {
                let t = 0.2 + 0.17 * k as f64;
                let z: f64 = (0.05 * k as f64).sin();
                let r = (1.0 - z * z).sqrt();
                vec![r * t.cos(), r * t.sin(), z]
            })
            .collect();
        let space = MetricMeasureSpace::build(sph, MetricId::Sphere2Geodesic, None).unwrap();
        space.validate(2000).unwrap();
    }

    #[test]
    fn json_round_trip() {
        let space = MetricMeasureSpace::build(
            vec![vec![0.0], vec![1.0], vec![2.5]],
            MetricId::CircleGeodesic,
            Some(vec![0.2, 0.3, 0.5]),
        )
        .unwrap();
        let text = space.to_json().unwrap();
        let back = MetricMeasureSpace::from_json(&text).unwrap();
        assert_eq!(back.n, 3);
        assert_eq!(back.metric, MetricId::CircleGeodesic);
        assert_eq!(back.dist, space.dist);
        assert_eq!(back.weights, space.weights);
        assert_eq!(back.coords, space.coords);
    }

    #[test]
    fn csv_import() {
        let text = "0,1,2\n1,0,1\n2,1,0\n";
        let space = MetricMeasureSpace::from_csv_dist(text, true).unwrap();
        assert_eq!(space.n, 3);
        assert_eq!(space.dist[[0, 2]], 2.0);
        space.validate(100).unwrap();
    }
}
