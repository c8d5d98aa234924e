use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("extent {extent} m on axis {axis} is not a multiple of the {unit} m unit")]
    NonDivisibleExtent { axis: usize, extent: f64, unit: f64 },
    #[error("non-positive dimension: {0}")]
    NonPositiveDimension(String),
    #[error("out of bounds: {0}")]
    OutOfBounds(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("ground cell ({x}, {y}) is not covered by any district")]
    MissingDistrict { x: usize, y: usize },
    #[error("impact energy must be > 0, got {0}")]
    NonPositiveEnergy(f64),
    #[error("height must be > 0, got {0}")]
    NonPositiveHeight(f64),
    #[error("component `{0}` has no positive value to normalize by")]
    ZeroMaximum(&'static str),
    #[error("invalid risk weights: {0}")]
    InvalidWeights(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("unsupported schema version {found}, expected {expected}")]
    SchemaVersionMismatch { found: u32, expected: u32 },
    #[error("endpoint {0} lies in an occupied cell")]
    OccupiedEndpoint(String),
    #[error("no path from {origin} to {destination}")]
    NoPath { origin: String, destination: String },
    #[error("dominant species set is empty")]
    EmptyDominantSet,
    #[error("no open points to cluster")]
    EmptyOpenSet,
    #[error("degenerate sample group: {0}")]
    DegenerateGroup(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn no_path(origin: crate::grid::CellIndex, destination: crate::grid::CellIndex) -> Self {
        Error::NoPath {
            origin: origin.to_string(),
            destination: destination.to_string(),
        }
    }
}
