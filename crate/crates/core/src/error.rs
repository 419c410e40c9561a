use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Pipeline stage an error originates from. The CLI maps these onto exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Input,
    Detection,
    Geometry,
    Classification,
    Config,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("pgm decode: {0}")]
    Decode(String),
    #[error("invalid dimensions {width}x{height} for {len} values")]
    Dimensions { width: usize, height: usize, len: usize },
    #[error("canvas mismatch: {0}x{1} vs {2}x{3}")]
    CanvasMismatch(usize, usize, usize, usize),
    #[error("image has no contrast, threshold is degenerate")]
    NoContrast,
    #[error("region is empty")]
    EmptyRegion,
    #[error("no component with area >= {min_area} (largest {largest})")]
    NoComponent { min_area: usize, largest: usize },
    #[error("record {0} has no annotated coordinates")]
    MissingCoordinates(String),
    #[error("region of interest window is empty after clamping")]
    DegenerateWindow,
    #[error("zero-extent region: every boundary point coincides with the centroid")]
    ZeroExtent,
    #[error("need at least {needed} extrema, got {got}")]
    TooFewExtrema { needed: usize, got: usize },
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shape does not fit in a {width}x{height} canvas")]
    ShapeOutOfCanvas { width: usize, height: usize },
    #[error("training set needs both classes")]
    SingleClass,
    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("annotation text is empty")]
    EmptyAnnotations,
}

impl Error {
    pub fn stage(&self) -> Stage {
        use Error::*;
        match self {
            Decode(_) | Dimensions { .. } | EmptyAnnotations => Stage::Input,
            NoContrast | EmptyRegion | NoComponent { .. } | MissingCoordinates(_)
            | DegenerateWindow | CanvasMismatch(..) => Stage::Detection,
            ZeroExtent | TooFewExtrema { .. } | DegeneratePolygon(_) | ShapeOutOfCanvas { .. } => {
                Stage::Geometry
            }
            SingleClass | DimensionMismatch { .. } | LengthMismatch(..) => Stage::Classification,
            InvalidParameter(_) => Stage::Config,
        }
    }
}
