use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bmt_cli::commands;
use bmt_cli::experiments::{self, ExperimentName, ExperimentSpec};

/// Barycentric merge trees for finite metric-measure data.
#[derive(Parser)]
#[command(name = "bmt", version, about)]
struct Cli {
    /// Base RNG seed for sampling and experiments.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for experiment repeats (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Output directory for experiment bundles.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw points from a built-in density and write the empirical space.
    Sample {
        /// Host space: circle-geodesic | sphere2-geodesic | euclidean-rd:<d> | grassmannian-gr2n:<n>.
        #[arg(long)]
        space: String,
        /// Density: uniform | bimodal | trimodal | six-mode | skewed | gauss2 | haar | dirac:<angle>=<w>,...
        #[arg(long)]
        dist: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute a p-deviation field over a space.
    Deviation {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// base | kernel:file.json | heat:t=<scale>,q=2
        #[arg(long, default_value = "base")]
        theta: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a δ-covering graph over a host space.
    Cover {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the induced cover mm-space (for feeding `deviation`).
        #[arg(long)]
        space_out: Option<PathBuf>,
    },
    /// Build a merge tree from a cover graph and a deviation field.
    Tree {
        #[arg(long)]
        graph: PathBuf,
        /// Host space the graph was built over.
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        field: PathBuf,
        /// Bin width ε applied to the field before the sweep.
        #[arg(long)]
        bin: Option<f64>,
        /// Persistence threshold for leaf pruning.
        #[arg(long)]
        simplify: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        newick: Option<PathBuf>,
    },
    /// Compare two trees (fused Kantorovich-Sturm bounds) or two spaces (w_p / GW).
    Compare {
        #[arg(long)]
        tree_a: Option<PathBuf>,
        #[arg(long)]
        tree_b: Option<PathBuf>,
        #[arg(long)]
        space_a: Option<PathBuf>,
        #[arg(long)]
        space_b: Option<PathBuf>,
        /// wp | gw (space mode only).
        #[arg(long, default_value = "gw")]
        mode: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a named end-to-end experiment and emit CSV/JSON plot data.
    Experiment {
        /// circle-mean-instability | circle-median-dirac | circle-bmt-stability |
        /// sphere-symmetric | sphere-asymmetric | mode-scale-sweep |
        /// polygon-modes | quantitative-stability
        #[arg(long)]
        name: String,
        #[arg(long, value_delimiter = ',')]
        sample_sizes: Option<Vec<usize>>,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        scales: Option<Vec<f64>>,
    },
    /// Schema-validate space/graph/field/tree files and re-check invariants.
    Validate {
        files: Vec<PathBuf>,
    },
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Sample {
            space,
            dist,
            n,
            out,
        } => {
            commands::cmd_sample(&space, &dist, n, cli.seed, &out)?;
            Ok(0)
        }
        Command::Deviation {
            space,
            p,
            theta,
            out,
        } => {
            commands::cmd_deviation(&space, p, &theta, &out)?;
            Ok(0)
        }
        Command::Cover {
            space,
            delta,
            out,
            space_out,
        } => {
            commands::cmd_cover(&space, delta, &out, space_out.as_deref())?;
            Ok(0)
        }
        Command::Tree {
            graph,
            space,
            field,
            bin,
            simplify,
            out,
            newick,
        } => {
            commands::cmd_tree(&graph, &space, &field, bin, simplify, &out, newick.as_deref())?;
            Ok(0)
        }
        Command::Compare {
            tree_a,
            tree_b,
            space_a,
            space_b,
            mode,
            p,
            out,
        } => {
            match (tree_a, tree_b, space_a, space_b) {
                (Some(a), Some(b), None, None) => commands::cmd_compare_trees(&a, &b, p, &out)?,
                (None, None, Some(a), Some(b)) => {
                    commands::cmd_compare_spaces(&a, &b, p, &mode, &out)?
                }
                _ => anyhow::bail!("pass either --tree-a/--tree-b or --space-a/--space-b"),
            }
            Ok(0)
        }
        Command::Experiment {
            name,
            sample_sizes,
            repeats,
            delta,
            epsilon,
            p,
            scales,
        } => {
            let name: ExperimentName = name.parse()?;
            let mut spec = ExperimentSpec::defaults(name);
            spec.seed = cli.seed;
            if let Some(v) = sample_sizes {
                spec.sample_sizes = v;
            }
            if let Some(v) = repeats {
                spec.repeats = v;
            }
            if let Some(v) = delta {
                spec.delta = v;
            }
            if let Some(v) = epsilon {
                spec.epsilon = v;
            }
            if let Some(v) = p {
                spec.p = v;
            }
            if let Some(v) = scales {
                spec.scales = v;
            }
            let bundle = experiments::run_experiment(&spec)?;
            let dir = cli.out_dir.join(name.to_string());
            let written = experiments::emit_plotdata(&bundle, &dir)?;
            for path in written {
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
        Command::Validate { files } => commands::cmd_validate(&files),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .ok();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(bmt_cli::exit_code_for(&err) as u8)
        }
    }
}
