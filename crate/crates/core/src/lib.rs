//! Barycentric merge trees for finite metric-measure spaces.
//!
//! The pipeline implemented here goes from a weighted point set to a rooted
//! tree summary of its barycenters or modes:
//!
//! 1. [`mmspace`] — finite metric-measure spaces `(V, d_V, ω)`, built-in
//!    geodesic metrics (circle, 2-sphere, Euclidean, Grassmannian) and
//!    seeded samplers for the built-in densities.
//! 2. [`deviation`] — Fréchet `p`-deviation fields `σ_p` for the base metric
//!    or for kernel-induced diffusion pseudo-metrics.
//! 3. [`covergraph`] — δ-covering graphs with the 3δ edge rule, merge radii,
//!    connectivity moduli and ε-binning of deviation fields.
//! 4. [`bmt`] — the barycentric merge tree itself: the quotient of the cover
//!    graph by sublevel-set connectivity, with its cophenetic pseudo-metric,
//!    pushforward measure and height function.
//! 5. [`transport`] — Wasserstein distances (exact network simplex and
//!    entropic Sinkhorn), Gromov-Wasserstein estimates, and fused
//!    Kantorovich-Sturm bounds between functional merge trees.

pub mod bmt;
pub mod covergraph;
pub mod deviation;
pub mod mmspace;
pub mod transport;

mod error;

pub use error::{Error, Result};
pub use mmspace::MetricMeasureSpace;
