use thiserror::Error;

use crate::metric::ParamPoint;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("point ({}, {}) lies outside the model domain", .0.u, .0.v)]
    PointOutsideDomain(ParamPoint),

    #[error("metric form is degenerate at pole point ({}, {})", .0.u, .0.v)]
    EvaluationAtPole(ParamPoint),

    #[error("invalid model parameter: {0}")]
    InvalidModel(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid nodes are not adjacent under the stencil")]
    NonAdjacentNodes,

    #[error("point ({}, {}) is not a grid node", .0.u, .0.v)]
    NotAGridNode(ParamPoint),

    #[error("target node {0} is unreachable from the source")]
    Unreachable(usize),

    #[error("distance matrices are built over different sample sets")]
    MismatchedSamples,

    #[error("background distance vanishes between distinct samples {0} and {1}")]
    ZeroBackgroundDistance(usize, usize),

    #[error("exponent {0} is out of range")]
    InvalidExponent(f64),

    #[error("path is empty")]
    EmptyPath,

    #[error("field and path live on different grids")]
    GridMismatch,

    #[error("radius {0} exceeds the domain diameter")]
    RadiusTooLarge(f64),

    #[error("radii must be positive and strictly decreasing")]
    InvalidRadii,

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}
