use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("generators {0} and {1} are parallel")]
    ParallelGenerators(usize, usize),

    #[error("line normal must be non-zero")]
    ZeroNormal,

    #[error("distance {value} is within 1e-9 of an integer; floor is ambiguous in floating mode")]
    BoundaryAmbiguous { value: f64 },

    #[error("distance {value} between points {i} and {j} is boundary-ambiguous in floating mode")]
    AmbiguousPair { i: usize, j: usize, value: f64 },

    #[error("vector is not a stored generator (or its negation)")]
    NotAGenerator,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),

    #[error("operation requires a box (parallelogram) shape")]
    NotBox,

    #[error("operation requires a non-box shape")]
    BoxShape,

    #[error("window is degenerate")]
    DegenerateWindow,

    #[error("point {index} lies outside the window")]
    OutsideWindow { index: usize },

    #[error("no idf scaling found in {trials} trials; points {pair:?} obstruct generator {generator}")]
    NoIdfScaling {
        trials: usize,
        pair: (usize, usize),
        generator: usize,
    },

    #[error("domain point {index} lies on the line")]
    PointOnLine { index: usize },

    #[error("map is not injective: points {0} and {1} share an image")]
    NotInjective(usize, usize),

    #[error("map sizes differ: {domain} domain points, {images} images")]
    LengthMismatch { domain: usize, images: usize },

    #[error("candidate is not a graph isomorphism: {0}")]
    NotIsomorphism(String),

    #[error("anchor points do not form a triangular set")]
    NotTriangular,

    #[error("reconstruction constraints are inconsistent: {0}")]
    Inconsistent(String),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("no triangular set with pairwise distances < 1 found")]
    NoTriangularSet,

    #[error("invalid enumeration: {0}")]
    InvalidEnumeration(String),

    #[error("index {index} out of range for {len} vertices")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
