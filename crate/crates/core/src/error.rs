use std::path::PathBuf;

use thiserror::Error;

use crate::tessellation::{CellId, RidgeId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate ridge: endpoints {distance:e} apart (threshold {threshold:e})")]
    DegenerateRidge { distance: f64, threshold: f64 },

    #[error("lines do not intersect: |sin angle| = {sine:e}")]
    NoIntersection { sine: f64 },

    #[error("voronoi construction failed: {0}")]
    Construction(String),

    #[error("no anchor-eligible cell in tessellation")]
    NoAnchor,

    #[error("cell {cell} is not anchor-eligible: {reason}")]
    IneligibleAnchor { cell: CellId, reason: String },

    #[error(
        "singular patch system (sigma_min = {sigma_min:e}): translation along the common ridge, \
         null direction ({:.6}, {:.6})",
        null_direction.0,
        null_direction.1
    )]
    SingularSystem {
        sigma_min: f64,
        null_direction: (f64, f64),
    },

    #[error("{} cells unreachable from the anchor patch: {cells:?}", cells.len())]
    UnreachableCells { cells: Vec<CellId> },

    #[error("cell {cell}: fewer than two non-parallel generator rays")]
    Underdetermined { cell: CellId },

    #[error("ridge {ridge} references out-of-range data")]
    BadRidge { ridge: RidgeId },

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("unsupported tessellation file version {found} (expected {expected})")]
    UnsupportedVersion { found: u64, expected: u64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("simulation n={n} seed={seed:#018x}: {source}")]
    Simulation {
        n: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
