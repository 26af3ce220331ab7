use thiserror::Error;

use crate::geometry::Coord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid side length {n}: must be at least {min}")]
    InvalidSize { n: usize, min: usize },

    #[error("unsupported dimension {0}: expected 2 or 3")]
    InvalidDims(usize),

    #[error("node {0} is outside the geometry")]
    NodeOutOfRange(Coord),

    #[error("no edge between {0} and {1}")]
    EdgeNotFound(Coord, Coord),

    #[error("removing the edge between {0} and {1} would disconnect the geometry")]
    WouldDisconnect(Coord, Coord),

    #[error("cannot place {requested} walls: at most {max} keep the geometry connected")]
    TooManyWalls { requested: usize, max: usize },

    #[error("node of degree 0 has no scattering operator")]
    IsolatedNode,

    #[error("speed is undefined: {0}")]
    UndefinedSpeed(&'static str),

    #[error("geometric series diverges for ratio {0}")]
    DivergentSeries(f64),

    #[error("malformed geometry file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
