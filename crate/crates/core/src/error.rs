use thiserror::Error;

/// Errors produced by the estimation, aggregation and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Simpson quadrature requires an equally spaced grid. Callers that can
    /// tolerate lower-order accuracy may use [`crate::fdata::integrate_any`],
    /// which falls back to the trapezoid rule.
    #[error("grid is not uniform; Simpson quadrature needs equal spacing (use the trapezoid fallback if lower-order accuracy is acceptable)")]
    NonUniformGrid,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("singular design: {0}")]
    SingularDesign(String),

    /// Every pairwise semi-metric distance in the sample is zero, so no
    /// bandwidth candidate grid can be formed.
    #[error("degenerate sample: all pairwise curve distances are zero")]
    DegenerateSample,

    /// The smoothed non-functional covariate has zero variance, so the
    /// partial linear coefficient is not identified.
    #[error("collinear covariate: (I - W)z has zero sum of squares")]
    CollinearCovariate,

    #[error("partition error: K = {k} does not divide n_train = {n_train}")]
    UnevenPartition { k: usize, n_train: usize },

    #[error("calibration requires a positive residual scale, got sigma = {0}")]
    InvalidSigma(f64),

    /// A per-block failure, annotated with the block that produced it.
    #[error("block {block}: {source}")]
    Block {
        block: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("no result rows to write")]
    EmptyResults,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Wraps an error with the id of the block that raised it.
    pub fn in_block(self, block: usize) -> Self {
        Error::Block {
            block,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
