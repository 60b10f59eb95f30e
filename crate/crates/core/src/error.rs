use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A pursuer lies inside or on the hull of the others (0-based index).
    #[error("pursuer {0} is redundant: it lies inside or on the hull of the others")]
    RedundantPursuer(usize),
    #[error("pursuer positions are collinear; no two-dimensional hull exists")]
    DegenerateHull,
    #[error("edge ({j}, {k}) has zero length")]
    DegenerateEdge { j: usize, k: usize },
    #[error("pursuer coincides with the evader; heading undefined")]
    ZeroDistance,
    #[error("speed ratio mu_max = {0} is outside the admissible range")]
    SpeedRatioOutOfRange(f64),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("evader is not strictly inside the pursuers' hull at t = 0 (min area {min_area:.3e})")]
    NotInitiallyEncircled { min_area: f64 },
    #[error("non-finite state encountered at t = {t}")]
    NumericalDivergence { t: f64 },
    #[error("failed to parse {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
