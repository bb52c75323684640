//! Scripted, seeded experiment pipelines emitting tidy CSV tables, tree files
//! and a run manifest.
//!
//! Population-level quantities are approximated by fixed fine discretizations
//! (a 2000-point host grid for trees, a smaller grid for Wasserstein
//! reference values); the manifest labels them `reference-proxy`. Repeats run
//! in a parallel worker pool, each repeat owning an RNG seeded by the base
//! seed plus its repeat index; rows are sorted before writing so output bytes
//! are independent of thread count.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use ndarray::{Array1, Array2};
use rayon::prelude::*;
use serde_json::json;

use bmt_core::bmt::{build_tree_raw, functional_tree, to_newick, MergeTree};
use bmt_core::covergraph::build_cover;
use bmt_core::deviation::{field_at_points, field_values, materialize_theta, PseudoMetricSpec};
use bmt_core::mmspace::{
    circle_grid, fibonacci_sphere, sample, Distribution, Frame2, MetricId, MetricMeasureSpace,
    SamplerSpec, SpaceKind,
};
use bmt_core::transport::{certified_lower_bound, fused_ks_estimate, wasserstein};
use bmt_core::Result as CoreResult;

/// Host grid resolution used as the fine reference discretization.
pub const REFERENCE_GRID: usize = 2000;
/// Grid resolution of the Wasserstein reference proxy (kept small enough that
/// every per-repeat transport solve stays on the exact path).
pub const W2_PROXY_GRID: usize = 100;
/// Grid used to locate empirical Fréchet means.
pub const MEAN_GRID: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentName {
    CircleMeanInstability,
    CircleMedianDirac,
    CircleBmtStability,
    SphereSymmetric,
    SphereAsymmetric,
    ModeScaleSweep,
    PolygonModes,
    QuantitativeStability,
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ExperimentName::CircleMeanInstability => "circle-mean-instability",
            ExperimentName::CircleMedianDirac => "circle-median-dirac",
            ExperimentName::CircleBmtStability => "circle-bmt-stability",
            ExperimentName::SphereSymmetric => "sphere-symmetric",
            ExperimentName::SphereAsymmetric => "sphere-asymmetric",
            ExperimentName::ModeScaleSweep => "mode-scale-sweep",
            ExperimentName::PolygonModes => "polygon-modes",
            ExperimentName::QuantitativeStability => "quantitative-stability",
        };
        f.write_str(s)
    }
}

impl FromStr for ExperimentName {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        Ok(match s {
            "circle-mean-instability" => ExperimentName::CircleMeanInstability,
            "circle-median-dirac" => ExperimentName::CircleMedianDirac,
            "circle-bmt-stability" => ExperimentName::CircleBmtStability,
            "sphere-symmetric" => ExperimentName::SphereSymmetric,
            "sphere-asymmetric" => ExperimentName::SphereAsymmetric,
            "mode-scale-sweep" => ExperimentName::ModeScaleSweep,
            "polygon-modes" => ExperimentName::PolygonModes,
            "quantitative-stability" => ExperimentName::QuantitativeStability,
            other => bail!("unknown experiment `{other}`"),
        })
    }
}

/// Full experiment configuration; every field lands in the manifest.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    pub seed: u64,
    pub sample_sizes: Vec<usize>,
    pub repeats: usize,
    pub delta: f64,
    /// Bin width for absolute binning, or a fraction of the field range for
    /// the kernel experiments (see each pipeline).
    pub epsilon: f64,
    pub p: f64,
    /// Kernel scales for the mode-scale sweep.
    pub scales: Vec<f64>,
}

impl ExperimentSpec {
    pub fn defaults(name: ExperimentName) -> Self {
        let base = ExperimentSpec {
            name,
            seed: 0,
            sample_sizes: vec![100],
            repeats: 50,
            delta: 0.05,
            epsilon: 0.02,
            p: 2.0,
            scales: vec![],
        };
        match name {
            ExperimentName::CircleMeanInstability => base,
            ExperimentName::CircleMedianDirac => ExperimentSpec {
                repeats: 1,
                ..base
            },
            ExperimentName::CircleBmtStability => ExperimentSpec {
                sample_sizes: vec![250],
                repeats: 100,
                ..base
            },
            ExperimentName::SphereSymmetric | ExperimentName::SphereAsymmetric => ExperimentSpec {
                repeats: 1,
                delta: 0.04,
                ..base
            },
            ExperimentName::ModeScaleSweep => ExperimentSpec {
                repeats: 1,
                scales: vec![0.02, 0.05, 0.1, 0.2, 0.5, 1.0],
                ..base
            },
            ExperimentName::PolygonModes => ExperimentSpec {
                repeats: 1,
                sample_sizes: vec![2000],
                delta: 0.0, // auto-tuned from nearest-neighbor spacing
                ..base
            },
            ExperimentName::QuantitativeStability => ExperimentSpec {
                sample_sizes: vec![10, 25, 50, 100, 250, 500, 1000],
                repeats: 50,
                ..base
            },
        }
    }

    fn validate(&self) -> anyhow::Result<()> {
        if self.repeats < 1 {
            bail!("repeats must be >= 1");
        }
        if self.sample_sizes.is_empty() {
            bail!("sample_sizes must not be empty");
        }
        Ok(())
    }
}

/// A tidy table: one row per observation.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

fn fmt_f(x: f64) -> String {
    format!("{x}")
}

/// Result bundle of a run: manifest, tables and named trees.
#[derive(Debug)]
pub struct Bundle {
    pub manifest: serde_json::Value,
    pub tables: Vec<Table>,
    pub trees: Vec<(String, MergeTree)>,
}

/// Write all CSV tables, tree files (JSON and Newick) and the manifest.
pub fn emit_plotdata(bundle: &Bundle, dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for table in &bundle.tables {
        let path = dir.join(format!("{}.csv", table.name));
        std::fs::write(&path, table.to_csv())?;
        written.push(path);
    }
    for (name, tree) in &bundle.trees {
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, tree.to_json().context("serializing tree")?)?;
        written.push(path);
        let path = dir.join(format!("{name}.nwk"));
        std::fs::write(&path, to_newick(tree))?;
        written.push(path);
    }
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&bundle.manifest)?)?;
    written.push(path);
    Ok(written)
}

/// Run a named experiment end to end.
pub fn run_experiment(spec: &ExperimentSpec) -> anyhow::Result<Bundle> {
    spec.validate()?;
    match spec.name {
        ExperimentName::CircleMedianDirac => circle_median_dirac(spec),
        ExperimentName::CircleMeanInstability => circle_mean_instability(spec),
        ExperimentName::CircleBmtStability => circle_bmt_stability(spec),
        ExperimentName::QuantitativeStability => quantitative_stability(spec),
        ExperimentName::SphereSymmetric => sphere_modes(spec, false),
        ExperimentName::SphereAsymmetric => sphere_modes(spec, true),
        ExperimentName::ModeScaleSweep => mode_scale_sweep(spec),
        ExperimentName::PolygonModes => polygon_modes(spec),
    }
}

fn base_manifest(spec: &ExperimentSpec) -> serde_json::Value {
    json!({
        "experiment": spec.name.to_string(),
        "seed": spec.seed,
        "sample_sizes": spec.sample_sizes,
        "repeats": spec.repeats,
        "delta": spec.delta,
        "epsilon": spec.epsilon,
        "p": spec.p,
        "scales": spec.scales,
        "version": env!("CARGO_PKG_VERSION"),
    })
}

/// Circle grid host carrying weights proportional to a density, renormalized
/// by the empirical sum over the grid.
fn circle_density_host(n: usize, dist: &Distribution) -> CoreResult<MetricMeasureSpace> {
    let coords = circle_grid(n);
    let raw: CoreResult<Vec<f64>> = coords
        .iter()
        .map(|c| dist.pdf(&SpaceKind::Circle, c))
        .collect();
    let raw = raw?;
    let total: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let fix: f64 = 1.0 - weights.iter().sum::<f64>();
    weights[0] += fix;
    MetricMeasureSpace::build(coords, MetricId::CircleGeodesic, Some(weights))
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    best
}

// --- circle-median-dirac -------------------------------------------------

/// Median fields of two-atom Dirac measures on the circle, checked against
/// the closed form (μ₁ − μ₂)φ + μ₂π on [0, π].
fn circle_median_dirac(spec: &ExperimentSpec) -> anyhow::Result<Bundle> {
    use std::f64::consts::PI;
    let n = 720;
    let mut table = Table::new(
        "median",
        &["mu1", "constant_field", "argmin_angle", "closed_form_max_err"],
    );
    for &mu1 in &[0.4, 0.5, 0.6] {
        let mut weights = vec![0.0; n];
        weights[0] = mu1;
        weights[n / 2] = 1.0 - mu1;
        let host = MetricMeasureSpace::build(
            circle_grid(n),
            MetricId::CircleGeodesic,
            Some(weights),
        )?;
        let field = bmt_core::deviation::deviation_field(&host, 1.0, &PseudoMetricSpec::Base)?;
        let values = field.values.as_slice().unwrap();
        let mu2 = 1.0 - mu1;
        let mut max_err = 0.0f64;
        for k in 0..=n / 2 {
            let phi = 2.0 * PI * k as f64 / n as f64;
            max_err = max_err.max((values[k] - ((mu1 - mu2) * phi + mu2 * PI)).abs());
        }
        let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - values.iter().cloned().fold(f64::INFINITY, f64::min);
        let constant = spread < 1e-12;
        let arg = argmin(values);
        let angle = 2.0 * PI * arg as f64 / n as f64;
        table.rows.push(vec![
            fmt_f(mu1),
            (constant as u8).to_string(),
            fmt_f(angle),
            fmt_f(max_err),
        ]);
    }
    let mut manifest = base_manifest(spec);
    manifest["grid"] = json!(n);
    Ok(Bundle {
        manifest,
        tables: vec![table],
        trees: vec![],
    })
}

// --- circle-mean-instability ----------------------------------------------

/// Fréchet means of empirical draws from the bimodal circle density: the
/// argmin of σ₂ jumps between the two antipodal minima across repeats.
fn circle_mean_instability(spec: &ExperimentSpec) -> anyhow::Result<Bundle> {
    use std::f64::consts::PI;
    let n = spec.sample_sizes[0];
    let grid = circle_grid(MEAN_GRID);
    let rows: anyhow::Result<Vec<Vec<String>>> = (0..spec.repeats)
        .into_par_iter()
        .map(|r| -> anyhow::Result<Vec<String>> {
            let (pts, _) = sample(&SamplerSpec {
                space: SpaceKind::Circle,
                distribution: Distribution::CircleBimodal,
                seed: spec.seed + r as u64,
                n,
            })?;
            let uniform = vec![1.0 / n as f64; n];
            let sigma = field_at_points(&MetricId::CircleGeodesic, &grid, &pts, &uniform, spec.p)?;
            let arg = argmin(&sigma);
            Ok(vec![
                r.to_string(),
                n.to_string(),
                fmt_f(2.0 * PI * arg as f64 / MEAN_GRID as f64),
                fmt_f(sigma[arg]),
            ])
        })
        .collect();
    let mut table = Table::new("mean_argmin", &["repeat", "n", "argmin_angle", "sigma_min"]);
    table.rows = rows?;
    table.rows.sort_by_key(|row| row[0].parse::<usize>().unwrap());
    let mut manifest = base_manifest(spec);
    manifest["mean_grid"] = json!(MEAN_GRID);
    manifest["density"] = json!("circle-bimodal");
    Ok(Bundle {
        manifest,
        tables: vec![table],
        trees: vec![],
    })
}

// --- circle-bmt-stability ---------------------------------------------------

/// Pairs of empirical draws: exact w₂ between the raw samples next to the
/// certified lower bound (and fused upper estimate) between their cover BMTs.
fn circle_bmt_stability(spec: &ExperimentSpec) -> anyhow::Result<Bundle> {
    let n = spec.sample_sizes[0];
    let host = MetricMeasureSpace::build(circle_grid(REFERENCE_GRID), MetricId::CircleGeodesic, None)?;
    let graph = build_cover(&host, spec.delta)?;
    let rows: anyhow::Result<Vec<Vec<String>>> = (0..spec.repeats)
        .into_par_iter()
        .map(|pair| -> anyhow::Result<Vec<String>> {
            let draw = |seed: u64| -> anyhow::Result<Vec<Vec<f64>>> {
                let (pts, _) = sample(&SamplerSpec {
                    space: SpaceKind::Circle,
                    distribution: Distribution::CircleBimodal,
                    seed,
                    n,
                })?;
                Ok(pts)
            };
            let pts_a = draw(spec.seed + 2 * pair as u64)?;
            let pts_b = draw(spec.seed + 2 * pair as u64 + 1)?;
            // Exact Wasserstein between the raw empirical measures.
            let mut cross = Array2::zeros((n, n));
            for i in 0..n {
                for j in 0..n {
                    cross[[i, j]] =
                        bmt_core::mmspace::circle_geodesic(pts_a[i][0], pts_b[j][0]);
                }
            }
            let uniform = vec![1.0 / n as f64; n];
            let (w2, _) = wasserstein(&cross, &uniform, &uniform, spec.p)?;
            // Cover trees of the two draws.
            let tree_of = |pts: &[Vec<f64>]| -> anyhow::Result<MergeTree> {
                let omega = graph.push_points(&host, pts)?;
                let sigma = field_values(&graph.dist, &Array1::from_vec(omega.clone()), spec.p);
                Ok(build_tree_raw(
                    &graph.adj,
                    sigma.as_slice().unwrap(),
                    &omega,
                    spec.p,
                )?)
            };
            let ta = tree_of(&pts_a)?;
            let tb = tree_of(&pts_b)?;
            let fa = functional_tree(&ta)?;
            let fb = functional_tree(&tb)?;
            let cmp = fused_ks_estimate(&fa, &fb, spec.p)?;
            Ok(vec![
                pair.to_string(),
                n.to_string(),
                fmt_f(w2),
                fmt_f(cmp.bounds.lower_bound),
                fmt_f(cmp.bounds.height_bound),
                fmt_f(cmp.bounds.ecc_bound),
                fmt_f(cmp.fused_value),
                fmt_f(cmp.relation_r),
            ])
        })
        .collect();
    let mut table = Table::new(
        "stability_pairs",
        &[
            "pair",
            "n",
            "w2",
            "lower_bound",
            "height_bound",
            "ecc_bound",
            "fused_value",
            "relation_r",
        ],
    );
    table.rows = rows?;
    table.rows.sort_by_key(|row| row[0].parse::<usize>().unwrap());
    let mut manifest = base_manifest(spec);
    manifest["host_grid"] = json!(REFERENCE_GRID);
    manifest["density"] = json!("circle-bimodal");
    manifest["binning"] = json!("none");
    Ok(Bundle {
        manifest,
        tables: vec![table],
        trees: vec![],
    })
}

// --- quantitative-stability --------------------------------------------------

/// Convergence of empirical BMTs to the reference-proxy tree as the sample
/// size grows, next to the (non-converging) spread of Fréchet means.
fn quantitative_stability(spec: &ExperimentSpec) -> anyhow::Result<Bundle> {
    use std::f64::consts::PI;
    let host = circle_density_host(REFERENCE_GRID, &Distribution::CircleBimodal)?;
    let graph = build_cover(&host, spec.delta)?;
    let ref_sigma = field_values(&graph.dist, &Array1::from_vec(graph.omega.clone()), spec.p);
    let ref_tree = build_tree_raw(
        &graph.adj,
        ref_sigma.as_slice().unwrap(),
        &graph.omega,
        spec.p,
    )?;
    let ref_ft = functional_tree(&ref_tree)?;

    // Wasserstein reference proxy on a coarser grid, kept on the exact path.
    let proxy = circle_density_host(W2_PROXY_GRID, &Distribution::CircleBimodal)?;
    let proxy_coords = proxy.coords.clone().unwrap();
    let proxy_weights = proxy.weights.to_vec();
    let mean_grid = circle_grid(MEAN_GRID);

    let mut tasks: Vec<(usize, usize, usize)> = Vec::new(); // (n_index, n, repeat)
    for (ni, &n) in spec.sample_sizes.iter().enumerate() {
        for r in 0..spec.repeats {
            tasks.push((ni, n, r));
        }
    }
    let rows: anyhow::Result<Vec<(usize, usize, Vec<String>)>> = tasks
        .par_iter()
        .map(|&(ni, n, r)| -> anyhow::Result<(usize, usize, Vec<String>)> {
            let seed = spec.seed + (ni * spec.repeats + r) as u64;
            let (pts, _) = sample(&SamplerSpec {
                space: SpaceKind::Circle,
                distribution: Distribution::CircleBimodal,
                seed,
                n,
            })?;
            let uniform = vec![1.0 / n as f64; n];
            // Exact w₂ to the proxy measure.
            let mut cross = Array2::zeros((n, W2_PROXY_GRID));
            for i in 0..n {
                for j in 0..W2_PROXY_GRID {
                    cross[[i, j]] =
                        bmt_core::mmspace::circle_geodesic(pts[i][0], proxy_coords[j][0]);
                }
            }
            let (w2, _) = wasserstein(&cross, &uniform, &proxy_weights, spec.p)?;
            // Empirical Fréchet mean location.
            let sigma_grid =
                field_at_points(&MetricId::CircleGeodesic, &mean_grid, &pts, &uniform, spec.p)?;
            let mean_angle = 2.0 * PI * argmin(&sigma_grid) as f64 / MEAN_GRID as f64;
            // Certified tree bound to the reference proxy.
            let omega = graph.push_points(&host, &pts)?;
            let sigma = field_values(&graph.dist, &Array1::from_vec(omega.clone()), spec.p);
            let tree = build_tree_raw(&graph.adj, sigma.as_slice().unwrap(), &omega, spec.p)?;
            let ft = functional_tree(&tree)?;
            let bounds = certified_lower_bound(&ft, &ref_ft, spec.p)?;
            Ok((
                n,
                r,
                vec![
                    n.to_string(),
                    r.to_string(),
                    fmt_f(w2),
                    fmt_f(mean_angle),
                    fmt_f(bounds.lower_bound),
                ],
            ))
        })
        .collect();
    let mut rows = rows?;
    rows.sort_by_key(|(n, r, _)| (*n, *r));

    let mut table = Table::new(
        "quantitative_stability",
        &["n", "repeat", "w2_to_proxy", "mean_angle", "tree_bound"],
    );
    let mut medians = Table::new(
        "medians",
        &["n", "median_tree_bound", "median_w2_to_proxy"],
    );
    for &n in &spec.sample_sizes {
        let mut bounds: Vec<f64> = Vec::new();
        let mut w2s: Vec<f64> = Vec::new();
        for (rn, _, row) in &rows {
            if *rn == n {
                w2s.push(row[2].parse().unwrap());
                bounds.push(row[4].parse().unwrap());
            }
        }
        bounds.sort_by(|a, b| a.partial_cmp(b).unwrap());
        w2s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        medians.rows.push(vec![
            n.to_string(),
            fmt_f(median_of_sorted(&bounds)),
            fmt_f(median_of_sorted(&w2s)),
        ]);
    }
    table.rows = rows.into_iter().map(|(_, _, row)| row).collect();

    let mut manifest = base_manifest(spec);
    manifest["host_grid"] = json!(REFERENCE_GRID);
    manifest["density"] = json!("circle-bimodal");
    manifest["tree_reference"] = json!("reference-proxy");
    manifest["w2_proxy_grid"] = json!(W2_PROXY_GRID);
    manifest["mean_grid"] = json!(MEAN_GRID);
    manifest["seed_rule"] = json!("seed + n_index * repeats + repeat");
    Ok(Bundle {
        manifest,
        tables: vec![table, medians],
        trees: vec![("reference_tree".to_string(), ref_tree)],
    })
}

fn median_of_sorted(sorted: &[f64]) -> f64 {
    let k = sorted.len();
    if k == 0 {
        return f64::NAN;
    }
    if k % 2 == 1 {
        sorted[k / 2]
    } else {
        0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
    }
}

// --- sphere experiments ------------------------------------------------------

/// BMT of a density on the 2-sphere over a Fibonacci-lattice discretization.
fn sphere_modes(spec: &ExperimentSpec, skewed: bool) -> anyhow::Result<Bundle> {
    let dist = if skewed {
        Distribution::SphereSkewed
    } else {
        Distribution::SphereSixMode
    };
    let coords = fibonacci_sphere(REFERENCE_GRID);
    let raw: CoreResult<Vec<f64>> = coords
        .iter()
        .map(|c| dist.pdf(&SpaceKind::Sphere2, c))
        .collect();
    let raw = raw?;
    let total: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let fix: f64 = 1.0 - weights.iter().sum::<f64>();
    weights[0] += fix;
    let host = MetricMeasureSpace::build(coords, MetricId::Sphere2Geodesic, Some(weights))?;
    let graph = build_cover(&host, spec.delta)?;
    anyhow::ensure!(graph.is_connected(), "sphere cover graph is disconnected");
    let sigma = field_values(&graph.dist, &Array1::from_vec(graph.omega.clone()), spec.p);
    let binned: Vec<f64> = sigma
        .iter()
        .map(|v| spec.epsilon * (v / spec.epsilon).floor())
        .collect();
    let tree = build_tree_raw(&graph.adj, &binned, &graph.omega, spec.p)?;
    let simplified = tree.simplify(0.01)?;

    let mut table = Table::new("leaves", &["leaf", "height", "merge_height", "mass"]);
    for &leaf in &simplified.leaves {
        let node = &simplified.nodes[leaf];
        let merge = node
            .parent
            .map(|p| simplified.nodes[p].height)
            .unwrap_or(node.height);
        table.rows.push(vec![
            leaf.to_string(),
            fmt_f(node.height),
            fmt_f(merge),
            fmt_f(node.mass),
        ]);
    }
    let mut manifest = base_manifest(spec);
    manifest["host"] = json!(format!("fibonacci-sphere-{REFERENCE_GRID}"));
    manifest["density"] = json!(if skewed { "sphere-skewed" } else { "sphere-six-mode" });
    manifest["simplify"] = json!(0.01);
    let name = if skewed { "sphere_skewed_tree" } else { "sphere_tree" };
    Ok(Bundle {
        manifest,
        tables: vec![table],
        trees: vec![(name.to_string(), simplified)],
    })
}

// --- mode-scale sweep ----------------------------------------------------------

/// Mode merge trees of the trimodal circle density across diffusion-kernel
/// scales; coarser kernels see fewer modes.
fn mode_scale_sweep(spec: &ExperimentSpec) -> anyhow::Result<Bundle> {
    let host = circle_density_host(REFERENCE_GRID, &Distribution::CircleTrimodal)?;
    let graph = build_cover(&host, spec.delta)?;
    let cover_space = graph.as_space(&host)?;
    let mut table = Table::new(
        "scale_sweep",
        &["t", "leaves", "sigma_min", "sigma_max", "bin_width"],
    );
    let mut trees = Vec::new();
    for &t in &spec.scales {
        let kernel = graph.dist.mapv(|d| (-d * d / t).exp());
        let pm = PseudoMetricSpec::KernelMatrix {
            q: 2.0,
            kernel,
            ref_weights: None,
        };
        let theta = materialize_theta(&cover_space, &pm)?;
        let sigma = field_values(&theta, &Array1::from_vec(graph.omega.clone()), spec.p);
        let lo = sigma.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = sigma.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let range = (hi - lo).max(1e-12);
        let bin = spec.epsilon * range;
        let binned: Vec<f64> = sigma.iter().map(|v| bin * (v / bin).floor()).collect();
        let tree = build_tree_raw(&graph.adj, &binned, &graph.omega, spec.p)?;
        let simplified = tree.simplify(0.5 * bin)?;
        table.rows.push(vec![
            fmt_f(t),
            simplified.leaves.len().to_string(),
            fmt_f(lo),
            fmt_f(hi),
            fmt_f(bin),
        ]);
        trees.push((format!("mode_tree_t{t}"), simplified));
    }
    let mut manifest = base_manifest(spec);
    manifest["host_grid"] = json!(REFERENCE_GRID);
    manifest["density"] = json!("circle-trimodal");
    manifest["kernel"] = json!("exp(-d^2 / t)");
    manifest["reference_measure"] = json!("uniform-on-cover");
    manifest["binning"] = json!("epsilon * field range, simplify at half a bin");
    Ok(Bundle {
        manifest,
        tables: vec![table],
        trees,
    })
}

// --- polygon modes ----------------------------------------------------------------

/// Total curvature of the closed polygon represented by a Grassmann 2-frame:
/// sum of absolute turning angles between consecutive edges. Edge vectors are
/// ((a_k)² − (b_k)², 2·a_k·b_k) for frame columns a, b.
pub fn polygon_total_curvature(frame: &Frame2) -> f64 {
    let n = frame.ambient;
    let edges: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let a = frame.cols[0][k];
            let b = frame.cols[1][k];
            (a * a - b * b, 2.0 * a * b)
        })
        .filter(|(x, y)| (x * x + y * y).sqrt() > 1e-12)
        .collect();
    let m = edges.len();
    let mut total = 0.0;
    for k in 0..m {
        let (x1, y1) = edges[k];
        let (x2, y2) = edges[(k + 1) % m];
        let n1 = (x1 * x1 + y1 * y1).sqrt();
        let n2 = (x2 * x2 + y2 * y2).sqrt();
        let cosang = ((x1 * x2 + y1 * y2) / (n1 * n2)).clamp(-1.0, 1.0);
        total += cosang.acos();
    }
    total
}

/// Mode merge trees on the moduli space of planar 10-gons, realized as
/// Gr₂(R¹⁰) with QR-sampled points, for the two-center density and the
/// extreme-total-curvature density.
fn polygon_modes(spec: &ExperimentSpec) -> anyhow::Result<Bundle> {
    let count = spec.sample_sizes[0];
    let ambient = 10;
    let (pts, haar_space) = sample(&SamplerSpec {
        space: SpaceKind::GrassmannGr2n(ambient),
        distribution: Distribution::GrassmannHaar,
        seed: spec.seed,
        n: count,
    })?;
    let frames: Vec<Frame2> = pts
        .iter()
        .map(|p| Frame2::from_flat(ambient, p))
        .collect::<CoreResult<_>>()?;
    let dist = &haar_space.dist;

    // Auto δ: smallest multiple of the worst nearest-neighbor spacing that
    // yields a connected cover graph.
    let mut worst_nn = 0.0f64;
    for i in 0..count {
        let mut nn = f64::INFINITY;
        for j in 0..count {
            if i != j {
                nn = nn.min(dist[[i, j]]);
            }
        }
        worst_nn = worst_nn.max(nn);
    }
    let mut delta = if spec.delta > 0.0 { spec.delta } else { worst_nn };

    let two_center: Vec<f64> = (0..count)
        .map(|i| (-dist[[i, 0]].powi(2)).exp() + (-dist[[i, 1]].powi(2)).exp())
        .collect();
    let curvatures: Vec<f64> = frames.iter().map(polygon_total_curvature).collect();
    let tc_mean = curvatures.iter().sum::<f64>() / count as f64;
    let curvature_density: Vec<f64> = curvatures
        .iter()
        .map(|tc| (tc - tc_mean).powi(4))
        .collect();

    let mut tables = Vec::new();
    let mut trees = Vec::new();
    let mut used_delta = delta;
    for (label, raw) in [("two_center", &two_center), ("curvature", &curvature_density)] {
        let total: f64 = raw.iter().sum();
        let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let fix: f64 = 1.0 - weights.iter().sum::<f64>();
        weights[0] += fix;
        let host = haar_space.restrict(&(0..count).collect::<Vec<_>>(), weights)?;
        // Grow δ geometrically until the 3δ graph is connected.
        let mut graph = build_cover(&host, delta)?;
        let mut guard = 0;
        while !graph.is_connected() && guard < 24 {
            delta *= 1.25;
            graph = build_cover(&host, delta)?;
            guard += 1;
        }
        anyhow::ensure!(graph.is_connected(), "polygon cover graph stayed disconnected");
        used_delta = delta;
        let cover_space = graph.as_space(&host)?;
        let kernel = graph.dist.mapv(|d| (-10.0 * d * d).exp());
        let pm = PseudoMetricSpec::KernelMatrix {
            q: 2.0,
            kernel,
            ref_weights: None,
        };
        let theta = materialize_theta(&cover_space, &pm)?;
        let sigma = field_values(&theta, &Array1::from_vec(graph.omega.clone()), spec.p);
        let lo = sigma.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = sigma.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let range = (hi - lo).max(1e-12);
        let bin = spec.epsilon * range;
        let binned: Vec<f64> = sigma.iter().map(|v| bin * (v / bin).floor()).collect();
        let tree = build_tree_raw(&graph.adj, &binned, &graph.omega, spec.p)?;
        let simplified = tree.simplify(0.5 * bin)?;

        let mut table = Table::new(
            &format!("polygon_{label}_leaves"),
            &["leaf", "height", "mass", "mode_vertex", "mode_total_curvature"],
        );
        for &leaf in &simplified.leaves {
            let node = &simplified.nodes[leaf];
            // The mode location: member with the smallest deviation value.
            let mode_local = node
                .members
                .iter()
                .copied()
                .min_by(|&a, &b| sigma[a].partial_cmp(&sigma[b]).unwrap())
                .unwrap();
            let host_vertex = graph.cover[mode_local];
            table.rows.push(vec![
                leaf.to_string(),
                fmt_f(node.height),
                fmt_f(node.mass),
                host_vertex.to_string(),
                fmt_f(curvatures[host_vertex]),
            ]);
        }
        tables.push(table);
        trees.push((format!("polygon_{label}_tree"), simplified));
    }

    let mut tc_table = Table::new("total_curvature", &["vertex", "total_curvature"]);
    for (i, tc) in curvatures.iter().enumerate() {
        tc_table.rows.push(vec![i.to_string(), fmt_f(*tc)]);
    }
    tables.push(tc_table);

    let mut manifest = base_manifest(spec);
    manifest["ambient"] = json!(ambient);
    manifest["samples"] = json!(count);
    manifest["kernel"] = json!("exp(-10 d^2)");
    manifest["centers"] = json!("first two Haar samples");
    manifest["delta_used"] = json!(used_delta);
    manifest["delta_rule"] = json!("worst nearest-neighbor spacing, grown 1.25x until connected");
    Ok(Bundle {
        manifest,
        tables,
        trees,
    })
}
