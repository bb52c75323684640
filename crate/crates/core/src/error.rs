use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown metric id `{0}`")]
    UnknownMetric(String),

    #[error("unknown distribution `{0}`")]
    UnknownDistribution(String),

    #[error("empty point list")]
    EmptyInput,

    #[error("weight vector has length {got}, expected {expected}")]
    WeightLength { expected: usize, got: usize },

    #[error("negative weight {value} at index {index}")]
    NegativeWeight { index: usize, value: f64 },

    #[error("weights sum to {0}, expected 1")]
    WeightSum(f64),

    #[error("point {index} does not lie on {space}: {detail}")]
    OffManifold {
        index: usize,
        space: String,
        detail: String,
    },

    #[error("frame is rank deficient after orthonormalization")]
    RankDeficientFrame,

    #[error("coordinate dimension mismatch: point {index} has {got} coordinates, expected {expected}")]
    CoordDim {
        index: usize,
        expected: usize,
        got: usize,
    },

    #[error("matrix is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    MatrixShape {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },

    #[error("deviation order p = {0} must be >= 1")]
    InvalidOrder(f64),

    #[error("diffusion norm order q = {0} must be >= 1")]
    InvalidNormOrder(f64),

    #[error("kernel scale t = {0} must be > 0")]
    InvalidScale(f64),

    #[error("heat pseudo-metric requires q = 2, got q = {0}")]
    HeatNormOrder(f64),

    #[error("pseudo-metric `{kind}` requires {what}")]
    MissingThetaInput { kind: String, what: String },

    #[error("theta is not admissible for this sample: dist[{i}][{j}] = 0 but theta[{i}][{j}] = {theta}")]
    NotAdmissible { i: usize, j: usize, theta: f64 },

    #[error("covering radius delta = {0} must be > 0")]
    InvalidDelta(f64),

    #[error("bin width epsilon = {0} must be > 0")]
    InvalidEpsilon(f64),

    #[error("vertices {i} and {j} lie in different connected components")]
    DisconnectedPair { i: usize, j: usize },

    #[error("graph is disconnected; components: {summary}")]
    DisconnectedGraph { summary: String },

    #[error("field has {got} values but the graph has {expected} cover vertices")]
    FieldLength { expected: usize, got: usize },

    #[error("tree has {got} nodes, above the dense-matrix cap of {cap}")]
    TreeTooLarge { got: usize, cap: usize },

    #[error("marginals do not match: source sums to {source_sum}, target sums to {target_sum}")]
    MarginalMismatch { source_sum: f64, target_sum: f64 },

    #[error("Sinkhorn did not reach marginal error {target:e} in {iterations} iterations (achieved {achieved:e})")]
    SinkhornNonConvergence {
        iterations: usize,
        target: f64,
        achieved: f64,
    },

    #[error("network simplex exceeded {0} pivots without reaching optimality")]
    SimplexNonConvergence(usize),

    #[error("problem size {rows}x{cols} exceeds the cap of {cap} entries")]
    SizeCap { rows: usize, cols: usize, cap: usize },

    #[error("empty sample")]
    EmptySample,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
