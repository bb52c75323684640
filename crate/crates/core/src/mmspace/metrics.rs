//! Built-in geodesic metrics.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Identifier of a built-in metric, carried in space JSON files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricId {
    /// Unit circle with geodesic (arc-length) distance; points are angles in radians.
    CircleGeodesic,
    /// Unit 2-sphere with geodesic distance; points are unit vectors in R^3.
    Sphere2Geodesic,
    /// Euclidean R^d; points are d-vectors.
    Euclidean { dim: usize },
    /// Grassmannian Gr_2(R^n) with the canonical geodesic distance; points are
    /// orthonormal 2-frames stored column-major as 2n-vectors.
    Grassmann2 { ambient: usize },
    /// Distance matrix supplied directly; no coordinates.
    Precomputed,
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricId::CircleGeodesic => write!(f, "circle-geodesic"),
            MetricId::Sphere2Geodesic => write!(f, "sphere2-geodesic"),
            MetricId::Euclidean { dim } => write!(f, "euclidean-rd:{dim}"),
            MetricId::Grassmann2 { ambient } => write!(f, "grassmannian-gr2n:{ambient}"),
            MetricId::Precomputed => write!(f, "precomputed"),
        }
    }
}

impl FromStr for MetricId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "circle-geodesic" {
            return Ok(MetricId::CircleGeodesic);
        }
        if s == "sphere2-geodesic" {
            return Ok(MetricId::Sphere2Geodesic);
        }
        if s == "precomputed" {
            return Ok(MetricId::Precomputed);
        }
        if let Some(d) = s.strip_prefix("euclidean-rd:") {
            if let Ok(dim) = d.parse::<usize>() {
                if dim > 0 {
                    return Ok(MetricId::Euclidean { dim });
                }
            }
        }
        if let Some(n) = s.strip_prefix("grassmannian-gr2n:") {
            if let Ok(ambient) = n.parse::<usize>() {
                if ambient >= 2 {
                    return Ok(MetricId::Grassmann2 { ambient });
                }
            }
        }
        Err(Error::UnknownMetric(s.to_string()))
    }
}

impl MetricId {
    /// Expected coordinate length per point, when the metric uses coordinates.
    pub fn coord_len(&self) -> Option<usize> {
        match self {
            MetricId::CircleGeodesic => Some(1),
            MetricId::Sphere2Geodesic => Some(3),
            MetricId::Euclidean { dim } => Some(*dim),
            MetricId::Grassmann2 { ambient } => Some(2 * ambient),
            MetricId::Precomputed => None,
        }
    }

    /// Distance between two coordinate vectors under this metric.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        match self {
            MetricId::CircleGeodesic => Ok(circle_geodesic(a[0], b[0])),
            MetricId::Sphere2Geodesic => Ok(sphere2_geodesic(a, b)),
            MetricId::Euclidean { .. } => Ok(euclidean(a, b)),
            MetricId::Grassmann2 { ambient } => {
                let fa = Frame2::from_flat(*ambient, a)?;
                let fb = Frame2::from_flat(*ambient, b)?;
                grassmann_geodesic(&fa, &fb)
            }
            MetricId::Precomputed => Err(Error::UnknownMetric("precomputed".into())),
        }
    }
}

/// Wrap an angle into [0, 2π).
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = a % two_pi;
    if r < 0.0 {
        r += two_pi;
    }
    r
}

/// Geodesic distance on the unit circle between two angles (radians).
pub fn circle_geodesic(a: f64, b: f64) -> f64 {
    let diff = (wrap_angle(a) - wrap_angle(b)).abs();
    diff.min(2.0 * PI - diff)
}

/// Geodesic distance on the unit 2-sphere between two unit vectors.
pub fn sphere2_geodesic(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    dot.clamp(-1.0, 1.0).acos()
}

/// Euclidean distance.
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// An orthonormal 2-frame in R^n, representing a point of Gr_2(R^n).
#[derive(Debug, Clone)]
pub struct Frame2 {
    /// Columns of the frame, each of length `ambient`.
    pub cols: [Vec<f64>; 2],
    pub ambient: usize,
}

const ORTHO_TOL: f64 = 1e-10;

impl Frame2 {
    /// Build a frame from two spanning vectors, orthonormalizing internally.
    ///
    /// Errors if the vectors do not span a 2-plane (rank deficiency below
    /// tolerance 1e-10 after Gram-Schmidt).
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() || u.len() < 2 {
            return Err(Error::RankDeficientFrame);
        }
        let ambient = u.len();
        let nu = norm(&u);
        if nu <= ORTHO_TOL {
            return Err(Error::RankDeficientFrame);
        }
        let c0: Vec<f64> = u.iter().map(|x| x / nu).collect();
        let proj: f64 = c0.iter().zip(&v).map(|(x, y)| x * y).sum();
        let mut w: Vec<f64> = v.iter().zip(&c0).map(|(y, x)| y - proj * x).collect();
        let nw = norm(&w);
        if nw <= ORTHO_TOL {
            return Err(Error::RankDeficientFrame);
        }
        for x in &mut w {
            *x /= nw;
        }
        Ok(Frame2 {
            cols: [c0, w],
            ambient,
        })
    }

    /// Decode a frame from a flat 2n-vector (column-major).
    pub fn from_flat(ambient: usize, flat: &[f64]) -> Result<Self> {
        if flat.len() != 2 * ambient {
            return Err(Error::CoordDim {
                index: 0,
                expected: 2 * ambient,
                got: flat.len(),
            });
        }
        Frame2::new(flat[..ambient].to_vec(), flat[ambient..].to_vec())
    }

    /// Flatten to a 2n-vector (column-major).
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = self.cols[0].clone();
        out.extend_from_slice(&self.cols[1]);
        out
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Geodesic distance on Gr_2(R^n): sqrt(θ1² + θ2²) where θi are the principal
/// angles between the column spans of the two frames.
pub fn grassmann_geodesic(a: &Frame2, b: &Frame2) -> Result<f64> {
    if a.ambient != b.ambient {
        return Err(Error::CoordDim {
            index: 0,
            expected: 2 * a.ambient,
            got: 2 * b.ambient,
        });
    }
    // M = A^T B is 2x2; its singular values are the cosines of the principal angles.
    let mut m = [[0.0f64; 2]; 2];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = a.cols[i].iter().zip(&b.cols[j]).map(|(x, y)| x * y).sum();
        }
    }
    let dm = DMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]]);
    let sv = dm.singular_values();
    let mut sum = 0.0;
    for s in sv.iter() {
        let theta = s.clamp(-1.0, 1.0).acos();
        sum += theta * theta;
    }
    Ok(sum.sqrt())
}
