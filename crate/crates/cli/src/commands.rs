//! Implementations of the file-oriented subcommands.

use std::path::Path;

use anyhow::{bail, Context};
use ndarray::{Array1, Array2};
use serde_json::json;
use sha2::{Digest, Sha256};

use bmt_core::bmt::{build_tree_binned, build_tree, functional_tree, to_newick, MergeTree};
use bmt_core::covergraph::{bin_field, build_cover, CoveringGraph};
use bmt_core::deviation::{deviation_field, DeviationField, FieldJson, PseudoMetricSpec};
use bmt_core::mmspace::{sample, Distribution, MetricMeasureSpace, SamplerSpec, SpaceKind};
use bmt_core::transport::{fused_ks_estimate, gw_estimate, wasserstein, PlanKind};

pub fn read_space(path: &Path) -> anyhow::Result<MetricMeasureSpace> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "csv") {
        Ok(MetricMeasureSpace::from_csv_dist(&text, true)?)
    } else {
        Ok(MetricMeasureSpace::from_json(&text)?)
    }
}

pub fn cmd_sample(
    space: &str,
    dist: &str,
    n: usize,
    seed: u64,
    out: &Path,
) -> anyhow::Result<()> {
    let spec = SamplerSpec {
        space: SpaceKind::parse(space)?,
        distribution: Distribution::parse(dist)?,
        seed,
        n,
    };
    let (_, empirical) = sample(&spec)?;
    std::fs::write(out, empirical.to_json()?)?;
    println!("sampled {} points onto {}", n, out.display());
    Ok(())
}

/// Parse the pseudo-metric grammar: `base`, `kernel:file.json`,
/// `heat:t=0.5,q=2`.
pub fn parse_theta(arg: &str) -> anyhow::Result<PseudoMetricSpec> {
    if arg == "base" {
        return Ok(PseudoMetricSpec::Base);
    }
    if let Some(path) = arg.strip_prefix("kernel:") {
        let text = std::fs::read_to_string(path)?;
        let doc: serde_json::Value = serde_json::from_str(&text)?;
        let q = doc.get("q").and_then(|v| v.as_f64()).unwrap_or(2.0);
        let kernel = doc
            .get("kernel")
            .and_then(|v| v.as_array())
            .context("kernel file needs a `kernel` matrix")?;
        let n = kernel.len();
        let mut mat = Array2::zeros((n, n));
        for (i, row) in kernel.iter().enumerate() {
            let row = row.as_array().context("kernel rows must be arrays")?;
            if row.len() != n {
                bail!("kernel matrix is not square");
            }
            for (j, v) in row.iter().enumerate() {
                mat[[i, j]] = v.as_f64().context("kernel entries must be numbers")?;
            }
        }
        let ref_weights = match doc.get("refWeights").and_then(|v| v.as_array()) {
            Some(arr) => {
                let w: Option<Vec<f64>> = arr.iter().map(|v| v.as_f64()).collect();
                Some(Array1::from_vec(w.context("refWeights must be numbers")?))
            }
            None => None,
        };
        return Ok(PseudoMetricSpec::KernelMatrix {
            q,
            kernel: mat,
            ref_weights,
        });
    }
    if let Some(params) = arg.strip_prefix("heat:") {
        let mut t = None;
        let mut q = 2.0;
        for part in params.split(',') {
            match part.split_once('=') {
                Some(("t", v)) => t = Some(v.parse::<f64>()?),
                Some(("q", v)) => q = v.parse::<f64>()?,
                _ => bail!("unrecognized heat parameter `{part}`"),
            }
        }
        let t = t.context("heat pseudo-metric needs t=<scale>")?;
        if (q - 2.0).abs() > 1e-12 {
            return Err(bmt_core::Error::HeatNormOrder(q).into());
        }
        return Ok(PseudoMetricSpec::HeatRd { t });
    }
    bail!("unrecognized theta spec `{arg}` (expected base | kernel:file.json | heat:t=..,q=2)")
}

pub fn cmd_deviation(space: &Path, p: f64, theta: &str, out: &Path) -> anyhow::Result<()> {
    let host = read_space(space)?;
    let pm = parse_theta(theta)?;
    let field = deviation_field(&host, p, &pm)?;
    std::fs::write(out, field.to_json()?)?;
    println!(
        "deviation field (p = {p}) over {} vertices written to {}",
        host.n,
        out.display()
    );
    Ok(())
}

pub fn cmd_cover(
    space: &Path,
    delta: f64,
    out: &Path,
    space_out: Option<&Path>,
) -> anyhow::Result<()> {
    let host = read_space(space)?;
    let graph = build_cover(&host, delta)?;
    std::fs::write(out, graph.to_json()?)?;
    if let Some(path) = space_out {
        let cover_space = graph.as_space(&host)?;
        std::fs::write(path, cover_space.to_json()?)?;
    }
    println!(
        "cover: {} of {} vertices, {} edges, connected: {}",
        graph.len(),
        host.n,
        graph.edges.len(),
        graph.is_connected()
    );
    Ok(())
}

pub fn read_field(path: &Path) -> anyhow::Result<FieldJson> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_tree(
    graph_path: &Path,
    host_path: &Path,
    field_path: &Path,
    bin: Option<f64>,
    simplify: Option<f64>,
    out: &Path,
    newick: Option<&Path>,
) -> anyhow::Result<()> {
    let host = read_space(host_path)?;
    let graph_text = std::fs::read_to_string(graph_path)?;
    let graph = CoveringGraph::from_json(&graph_text, &host)?;
    let field = read_field(field_path)?;
    if field.values.len() != graph.len() {
        bail!(
            "field has {} values but the cover has {} vertices",
            field.values.len(),
            graph.len()
        );
    }
    let devf = DeviationField {
        p: field.p,
        values: Array1::from_vec(field.values.clone()),
        theta: Array2::zeros((0, 0)),
        theta_kind: field.theta_kind,
    };
    let mut tree = match bin {
        Some(eps) => {
            let binned = bin_field(&devf, eps)?;
            build_tree_binned(&graph, &binned)?
        }
        None => build_tree(&graph, &field.values, field.p)?,
    };
    if let Some(threshold) = simplify {
        tree = tree.simplify(threshold)?;
    }
    tree.provenance = json!({
        "graph": graph_path.display().to_string(),
        "field": field_path.display().to_string(),
        "bin": bin,
        "simplify": simplify,
        "delta": graph.delta,
        "theta_kind": field.theta_kind,
    });
    std::fs::write(out, tree.to_json()?)?;
    if let Some(path) = newick {
        std::fs::write(path, to_newick(&tree))?;
    }
    println!(
        "tree: {} nodes, {} leaves, root height {}",
        tree.len(),
        tree.leaves.len(),
        tree.nodes[tree.root].height
    );
    Ok(())
}

fn plan_checksum(plan: &Array2<f64>) -> String {
    let mut hasher = Sha256::new();
    hasher.update((plan.nrows() as u64).to_le_bytes());
    hasher.update((plan.ncols() as u64).to_le_bytes());
    for v in plan.iter() {
        hasher.update(v.to_le_bytes());
    }
    format!("{:x}", hasher.finalize())
}

pub fn cmd_compare_trees(a: &Path, b: &Path, p: f64, out: &Path) -> anyhow::Result<()> {
    let ta = MergeTree::from_json(&std::fs::read_to_string(a)?)?;
    let tb = MergeTree::from_json(&std::fs::read_to_string(b)?)?;
    let fa = functional_tree(&ta)?;
    let fb = functional_tree(&tb)?;
    let cmp = fused_ks_estimate(&fa, &fb, p)?;
    let doc = json!({
        "p": p,
        "structural_offset": cmp.structural_offset,
        "functional_offset": cmp.functional_offset,
        "fused_value": cmp.fused_value,
        "lower_bound": cmp.bounds.lower_bound,
        "height_bound": cmp.bounds.height_bound,
        "ecc_bound": cmp.bounds.ecc_bound,
        "relation_r": cmp.relation_r,
        "lambda": cmp.lambda,
        "plan_kind": match cmp.plan.kind { PlanKind::Exact => "exact", PlanKind::Entropic => "entropic" },
        "plan_checksum": plan_checksum(&cmp.plan.plan),
        "note": "fused_value is a non-certified upper estimate; lower_bound is certified",
    });
    std::fs::write(out, serde_json::to_string_pretty(&doc)?)?;
    println!(
        "lower bound {} <= D_KS <= (non-certified) {}",
        cmp.bounds.lower_bound, cmp.fused_value
    );
    Ok(())
}

pub fn cmd_compare_spaces(
    a: &Path,
    b: &Path,
    p: f64,
    mode: &str,
    out: &Path,
) -> anyhow::Result<()> {
    let sa = read_space(a)?;
    let sb = read_space(b)?;
    let doc = match mode {
        "gw" => {
            let est = gw_estimate(&sa.dist, &sa.weights, &sb.dist, &sb.weights, p)?;
            json!({
                "p": p,
                "mode": "gw",
                "value": est.value,
                "exact": est.exact,
                "solver_value": est.solver_value,
                "solver_iterations": est.solver_iterations,
                "inner_marginal_error": est.inner_marginal_error,
                "plan_checksum": plan_checksum(&est.plan),
                "note": if est.exact { "value from permutation enumeration" } else { "non-certified local optimum" },
            })
        }
        "wp" => {
            // Same vertex set interpretation: cross-distance matrix required.
            if sa.n != sb.n {
                bail!("wp mode expects equal-size spaces sharing a metric; got {} vs {}", sa.n, sb.n);
            }
            let (value, plan) = wasserstein(&sa.dist, &sa.weights.to_vec(), &sb.weights.to_vec(), p)?;
            json!({
                "p": p,
                "mode": "wp",
                "value": value,
                "plan_kind": match plan.kind { PlanKind::Exact => "exact", PlanKind::Entropic => "entropic" },
                "plan_checksum": plan_checksum(&plan.plan),
                "note": "cross-distances taken from space A's matrix; weights are the two marginals",
            })
        }
        other => bail!("unknown compare mode `{other}` (expected wp|gw)"),
    };
    std::fs::write(out, serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}

/// Schema-validate any space/graph/field/tree JSON and re-check its type
/// invariants. Returns the list of violations (empty = valid).
pub fn validate_file(path: &Path) -> anyhow::Result<Vec<String>> {
    let text = std::fs::read_to_string(path)?;
    let doc: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("{} is not JSON", path.display()))?;
    let mut violations = Vec::new();
    if doc.get("dist").is_some() {
        match MetricMeasureSpace::from_json(&text) {
            Ok(space) => {
                if let Err(e) = space.validate(20_000) {
                    violations.push(classify(&e));
                }
            }
            Err(e) => violations.push(classify(&e)),
        }
    } else if doc.get("nodes").is_some() {
        match MergeTree::from_json(&text) {
            Ok(tree) => {
                if let Err(e) = tree.validate() {
                    violations.push(classify(&e));
                }
            }
            Err(e) => violations.push(classify(&e)),
        }
    } else if doc.get("cover").is_some() {
        let cover_ok = doc["cover"].is_array()
            && doc["edges"].is_array()
            && doc["assign"].is_array()
            && doc["omega"].is_array();
        if !cover_ok {
            violations.push("graph schema: cover/edges/assign/omega arrays required".into());
        } else {
            let omega: Vec<f64> = doc["omega"]
                .as_array()
                .unwrap()
                .iter()
                .filter_map(|v| v.as_f64())
                .collect();
            let total: f64 = omega.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                violations.push(format!("measure normalization: omega sums to {total}"));
            }
            if omega.iter().any(|&w| w < 0.0) {
                violations.push("negative omega entry".into());
            }
        }
    } else if doc.get("values").is_some() {
        match serde_json::from_str::<FieldJson>(&text) {
            Ok(field) => {
                if field.p < 1.0 {
                    violations.push(format!("order p = {} below 1", field.p));
                }
                if field.values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    violations.push("field values must be finite and nonnegative".into());
                }
            }
            Err(e) => violations.push(format!("field schema: {e}")),
        }
    } else {
        violations.push("unrecognized document (expected space/graph/field/tree JSON)".into());
    }
    Ok(violations)
}

fn classify(err: &bmt_core::Error) -> String {
    let text = err.to_string();
    if text.contains("height monotonicity") {
        "height monotonicity".to_string()
    } else if text.contains("masses sum") || text.contains("weights sum") {
        format!("measure normalization: {text}")
    } else {
        text
    }
}

pub fn cmd_validate(paths: &[std::path::PathBuf]) -> anyhow::Result<i32> {
    let mut bad = false;
    for path in paths {
        match validate_file(path) {
            Ok(violations) if violations.is_empty() => {
                println!("{}: ok", path.display());
            }
            Ok(violations) => {
                bad = true;
                for v in violations {
                    println!("{}: violation: {v}", path.display());
                }
            }
            Err(e) => {
                bad = true;
                println!("{}: error: {e}", path.display());
            }
        }
    }
    Ok(if bad { 2 } else { 0 })
}
