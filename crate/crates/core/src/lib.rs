//! Random geometric graphs over norm-derived planar metrics.
//!
//! Modules follow the workflow: [`geometry`] for shapes and distances,
//! [`dense_set`] for point samples, [`larg`] for graph sampling, [`stepiso`]
//! for step-isometry constructions and checks, [`anchoring`] for line grids
//! and reconstruction, and [`experiments`] for the Monte Carlo drivers.

pub mod anchoring;
pub mod dense_set;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod io;
pub mod larg;
pub mod scalar;
pub mod stepiso;

pub use error::{Error, Result};
pub use geometry::{Line, LpShape, Mat2, Metric, NormShape, Polygon, Vec2};
pub use scalar::{Coord, QuadraticSurd, Rational, Scalar, Sqrt2};

/// Environment variable capping the worker pool size.
pub const THREADS_ENV: &str = "LARG_LAB_THREADS";

/// Worker pool honouring [`THREADS_ENV`]; falls back to rayon's default size.
pub fn worker_pool() -> rayon::ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        builder = builder.num_threads(n);
    }
    builder.build().expect("thread pool")
}
