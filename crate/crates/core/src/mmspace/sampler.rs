//! Seeded samplers for the built-in spaces and densities.
//!
//! Sampling is fully deterministic: identical `(spec, seed)` produces
//! bit-identical output. Densities on compact spaces are specified as
//! unnormalized formulas and sampled by rejection against a uniform proposal,
//! with the density ceiling estimated on a fixed probe grid. Gaussian mixtures
//! on the line are sampled directly (no uniform proposal exists there) and
//! Dirac mixtures by cumulative weight lookup.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as RandDistribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::metrics::{sphere2_geodesic, wrap_angle, Frame2, MetricId};
use super::MetricMeasureSpace;
use crate::{Error, Result};

/// Host space of a sampler.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceKind {
    Circle,
    Sphere2,
    EuclideanRd(usize),
    GrassmannGr2n(usize),
}

impl SpaceKind {
    pub fn metric_id(&self) -> MetricId {
        match self {
            SpaceKind::Circle => MetricId::CircleGeodesic,
            SpaceKind::Sphere2 => MetricId::Sphere2Geodesic,
            SpaceKind::EuclideanRd(d) => MetricId::Euclidean { dim: *d },
            SpaceKind::GrassmannGr2n(n) => MetricId::Grassmann2 { ambient: *n },
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.parse::<MetricId>()? {
            MetricId::CircleGeodesic => Ok(SpaceKind::Circle),
            MetricId::Sphere2Geodesic => Ok(SpaceKind::Sphere2),
            MetricId::Euclidean { dim } => Ok(SpaceKind::EuclideanRd(dim)),
            MetricId::Grassmann2 { ambient } => Ok(SpaceKind::GrassmannGr2n(ambient)),
            MetricId::Precomputed => Err(Error::UnknownMetric(s.to_string())),
        }
    }
}

/// The six mode centers of the symmetric sphere density: intersections of the
/// sphere with the coordinate axes.
pub const SPHERE_AXIS_MODES: [[f64; 3]; 6] = [
    [1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, -1.0, 0.0],
    [0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0],
];

/// A named density with parameters, on one of the built-in spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Distribution {
    /// Uniform on a compact built-in space.
    Uniform,
    /// Bimodal circle density with antipodal bumps at angles 0 and π:
    /// `exp(κ cos φ) + exp(κ cos(φ - π))` with κ = 4.
    CircleBimodal,
    /// Three circle bumps of distinct widths and weights, for multiscale mode
    /// structure: `Σ wᵢ exp(κᵢ cos(φ - mᵢ))`.
    CircleTrimodal,
    /// Dirac mixture on the circle: atoms `(angle, weight)`.
    DiracMixture(Vec<(f64, f64)>),
    /// Sphere density decaying exponentially in geodesic distance from the six
    /// axis points: `exp(-10 · d(x, S))`.
    SphereSixMode,
    /// Asymmetric sphere density: unequal bumps at perturbed axis points.
    SphereSkewed,
    /// Gaussian mixture on the real line: components `(weight, mean, sd)`.
    GaussMix1d(Vec<(f64, f64, f64)>),
    /// Invariant (Haar) measure on the Grassmannian, via QR of Gaussian matrices.
    GrassmannHaar,
}

impl Distribution {
    /// Parse a distribution name with optional parameters.
    pub fn parse(name: &str) -> Result<Self> {
        if name == "uniform" {
            return Ok(Distribution::Uniform);
        }
        if name == "bimodal" {
            return Ok(Distribution::CircleBimodal);
        }
        if name == "trimodal" {
            return Ok(Distribution::CircleTrimodal);
        }
        if name == "six-mode" {
            return Ok(Distribution::SphereSixMode);
        }
        if name == "skewed" {
            return Ok(Distribution::SphereSkewed);
        }
        if name == "gauss2" {
            return Ok(Distribution::GaussMix1d(vec![
                (0.5, -1.5, 0.5),
                (0.5, 1.5, 0.35),
            ]));
        }
        if name == "haar" {
            return Ok(Distribution::GrassmannHaar);
        }
        if let Some(spec) = name.strip_prefix("dirac:") {
            let mut atoms = Vec::new();
            for part in spec.split(',') {
                let (a, w) = part
                    .split_once('=')
                    .ok_or_else(|| Error::UnknownDistribution(name.to_string()))?;
                let a: f64 = a
                    .trim()
                    .parse()
                    .map_err(|_| Error::UnknownDistribution(name.to_string()))?;
                let w: f64 = w
                    .trim()
                    .parse()
                    .map_err(|_| Error::UnknownDistribution(name.to_string()))?;
                atoms.push((a, w));
            }
            if atoms.is_empty() {
                return Err(Error::UnknownDistribution(name.to_string()));
            }
            return Ok(Distribution::DiracMixture(atoms));
        }
        Err(Error::UnknownDistribution(name.to_string()))
    }

    /// Unnormalized density at a point of the host space. Dirac mixtures and
    /// the Haar measure have no density; they return an error.
    pub fn pdf(&self, space: &SpaceKind, point: &[f64]) -> Result<f64> {
        match (self, space) {
            (Distribution::Uniform, _) => Ok(1.0),
            (Distribution::CircleBimodal, SpaceKind::Circle) => {
                let phi = point[0];
                Ok((4.0 * phi.cos()).exp() + (4.0 * (phi - PI).cos()).exp())
            }
            (Distribution::CircleTrimodal, SpaceKind::Circle) => {
                let phi = point[0];
                Ok(1.0 * (6.0 * (phi - 0.8).cos()).exp()
                    + 0.6 * (16.0 * (phi - 2.9).cos()).exp()
                    + 0.5 * (9.0 * (phi - 4.9).cos()).exp())
            }
            (Distribution::SphereSixMode, SpaceKind::Sphere2) => {
                let d = SPHERE_AXIS_MODES
                    .iter()
                    .map(|m| sphere2_geodesic(point, m))
                    .fold(f64::INFINITY, f64::min);
                Ok((-10.0 * d).exp())
            }
            (Distribution::SphereSkewed, SpaceKind::Sphere2) => {
                let mut total = 0.0;
                for (k, (w, c)) in SPHERE_SKEW_PARAMS.iter().enumerate() {
                    let m = sphere_skew_mode(k);
                    total += w * (-c * sphere2_geodesic(point, &m)).exp();
                }
                Ok(total)
            }
            (Distribution::GaussMix1d(parts), SpaceKind::EuclideanRd(1)) => {
                let x = point[0];
                let mut total = 0.0;
                for &(w, m, s) in parts {
                    let z = (x - m) / s;
                    total += w * (-0.5 * z * z).exp() / (s * (2.0 * PI).sqrt());
                }
                Ok(total)
            }
            _ => Err(Error::UnknownDistribution(format!(
                "{self:?} on {space:?}"
            ))),
        }
    }

    fn supports(&self, space: &SpaceKind) -> bool {
        matches!(
            (self, space),
            (Distribution::Uniform, SpaceKind::Circle)
                | (Distribution::Uniform, SpaceKind::Sphere2)
                | (Distribution::CircleBimodal, SpaceKind::Circle)
                | (Distribution::CircleTrimodal, SpaceKind::Circle)
                | (Distribution::DiracMixture(_), SpaceKind::Circle)
                | (Distribution::SphereSixMode, SpaceKind::Sphere2)
                | (Distribution::SphereSkewed, SpaceKind::Sphere2)
                | (Distribution::GaussMix1d(_), SpaceKind::EuclideanRd(1))
                | (Distribution::GrassmannHaar, SpaceKind::GrassmannGr2n(_))
        )
    }
}

// (weight, decay rate) for the skewed sphere density.
const SPHERE_SKEW_PARAMS: [(f64, f64); 6] = [
    (1.0, 9.0),
    (0.85, 10.0),
    (0.55, 8.0),
    (0.5, 11.0),
    (0.4, 9.0),
    (0.3, 10.0),
];

fn sphere_skew_mode(k: usize) -> [f64; 3] {
    // Axis points pushed through diag(1, 0.75, 0.55) and renormalized.
    let stretch = [1.0, 0.75, 0.55];
    let m = SPHERE_AXIS_MODES[k];
    let mut v = [m[0] * stretch[0], m[1] * stretch[1], m[2] * stretch[2]];
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    for x in &mut v {
        *x /= norm;
    }
    v
}

/// Full description of a sampling run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub space: SpaceKind,
    pub distribution: Distribution,
    pub seed: u64,
    pub n: usize,
}

/// Draw `spec.n` points and return them with the uniform-weight empirical
/// space over them.
pub fn sample(spec: &SamplerSpec) -> Result<(Vec<Vec<f64>>, MetricMeasureSpace)> {
    if spec.n == 0 {
        return Err(Error::EmptySample);
    }
    if !spec.distribution.supports(&spec.space) {
        return Err(Error::UnknownDistribution(format!(
            "{:?} on {:?}",
            spec.distribution, spec.space
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let points = match (&spec.distribution, &spec.space) {
        (Distribution::DiracMixture(atoms), SpaceKind::Circle) => {
            let total: f64 = atoms.iter().map(|(_, w)| w).sum();
            if total <= 0.0 {
                return Err(Error::InvalidInput("dirac mixture has no mass".into()));
            }
            (0..spec.n)
                .map(|_| {
                    let mut u = rng.random::<f64>() * total;
                    for &(a, w) in atoms {
                        if u < w {
                            return vec![wrap_angle(a)];
                        }
                        u -= w;
                    }
                    vec![wrap_angle(atoms[atoms.len() - 1].0)]
                })
                .collect()
        }
        (Distribution::GaussMix1d(parts), SpaceKind::EuclideanRd(1)) => {
            let total: f64 = parts.iter().map(|(w, _, _)| w).sum();
            (0..spec.n)
                .map(|_| {
                    let mut u = rng.random::<f64>() * total;
                    let mut pick = parts[parts.len() - 1];
                    for &(w, m, s) in parts {
                        if u < w {
                            pick = (w, m, s);
                            break;
                        }
                        u -= w;
                    }
                    let z: f64 = StandardNormal.sample(&mut rng);
                    vec![pick.1 + pick.2 * z]
                })
                .collect()
        }
        (Distribution::GrassmannHaar, SpaceKind::GrassmannGr2n(n)) => {
            let mut pts = Vec::with_capacity(spec.n);
            for _ in 0..spec.n {
                pts.push(haar_frame(*n, &mut rng)?.to_flat());
            }
            pts
        }
        (dist, SpaceKind::Circle) => {
            let ceiling = circle_ceiling(dist)?;
            (0..spec.n)
                .map(|_| {
                    loop {
                        let phi = rng.random::<f64>() * 2.0 * PI;
                        let u: f64 = rng.random();
                        let f = dist.pdf(&SpaceKind::Circle, &[phi]).expect("pdf");
                        if u * ceiling <= f {
                            return vec![phi];
                        }
                    }
                })
                .collect()
        }
        (dist, SpaceKind::Sphere2) => {
            let ceiling = sphere_ceiling(dist)?;
            (0..spec.n)
                .map(|_| {
                    loop {
                        let z = 2.0 * rng.random::<f64>() - 1.0;
                        let phi = rng.random::<f64>() * 2.0 * PI;
                        let u: f64 = rng.random();
                        let r = (1.0 - z * z).max(0.0).sqrt();
                        let p = vec![r * phi.cos(), r * phi.sin(), z];
                        let f = dist.pdf(&SpaceKind::Sphere2, &p).expect("pdf");
                        if u * ceiling <= f {
                            return p;
                        }
                    }
                })
                .collect()
        }
        _ => {
            return Err(Error::UnknownDistribution(format!(
                "{:?} on {:?}",
                spec.distribution, spec.space
            )))
        }
    };
    let space = MetricMeasureSpace::build(points.clone(), spec.space.metric_id(), None)?;
    Ok((points, space))
}

fn circle_ceiling(dist: &Distribution) -> Result<f64> {
    let mut max = 0.0f64;
    for k in 0..4096 {
        let phi = 2.0 * PI * k as f64 / 4096.0;
        max = max.max(dist.pdf(&SpaceKind::Circle, &[phi])?);
    }
    Ok(max * 1.2)
}

fn sphere_ceiling(dist: &Distribution) -> Result<f64> {
    let mut max = 0.0f64;
    for p in fibonacci_sphere(8192) {
        max = max.max(dist.pdf(&SpaceKind::Sphere2, &p)?);
    }
    Ok(max * 1.5)
}

/// Deterministic quasi-uniform point set on the 2-sphere (Fibonacci lattice).
pub fn fibonacci_sphere(n: usize) -> Vec<Vec<f64>> {
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    (0..n)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = 2.0 * PI * (k as f64 / golden).fract();
            vec![r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Uniform angle grid on the circle with `n` vertices starting at angle 0.
pub fn circle_grid(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|k| vec![2.0 * PI * k as f64 / n as f64])
        .collect()
}

fn haar_frame(ambient: usize, rng: &mut ChaCha8Rng) -> Result<Frame2> {
    let g: DMatrix<f64> = DMatrix::from_fn(ambient, 2, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // Fix the sign convention so the frame is a deterministic function of g.
    for j in 0..2 {
        if r[(j, j)] < 0.0 {
            for i in 0..ambient {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    Frame2::new(
        q.column(0).iter().copied().collect(),
        q.column(1).iter().copied().collect(),
    )
}
