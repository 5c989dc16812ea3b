//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A closed polygon or grid needs at least three vertices/intervals.
    #[error("need at least 3 vertices or grid intervals, got {0}")]
    InvalidN(usize),

    /// An edge collapsed below the degeneracy floor.
    #[error("degenerate edge {index} (length {length:.3e}){}", fmt_time(.time))]
    DegenerateEdge {
        index: usize,
        length: f64,
        /// Flow time of the failure, when it happened inside a time loop.
        time: Option<f64>,
    },

    /// All vertices are collinear; the orientation of the polygon is undefined.
    #[error("polygon has zero enclosed area; orientation is undefined")]
    ZeroArea,

    /// Extended fan area requested with `k` adjacent to the base edge.
    #[error("invalid index k={k} for the fan triangle at j={j}: k must differ from j-1 and j")]
    InvalidIndex { j: usize, k: usize },

    /// Argument outside the domain of a formula.
    #[error("argument {value} outside [{lo}, {hi}]")]
    DomainError { value: f64, lo: f64, hi: f64 },

    /// A pivot block of the cyclic solve was too ill-conditioned.
    #[error("singular or ill-conditioned pivot at block {block}")]
    SingularSystem { block: usize },

    /// Trajectory pair does not have the (4x steps, 2x grid) refinement shape.
    #[error("incompatible refinement pair: {0}")]
    IncompatibleRefinement(String),

    /// A run parameter failed validation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A curve descriptor or polygon file could not be parsed.
    #[error("cannot parse curve: {0}")]
    ParseCurve(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Attach a flow time to a degeneracy error raised inside a time loop.
    pub(crate) fn at_time(self, t: f64) -> Error {
        match self {
            Error::DegenerateEdge { index, length, .. } => {
                Error::DegenerateEdge { index, length, time: Some(t) }
            }
            other => other,
        }
    }
}

fn fmt_time(time: &Option<f64>) -> String {
    match time {
        Some(t) => format!(" at t={t:.6}"),
        None => String::new(),
    }
}
