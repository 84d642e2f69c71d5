use thiserror::Error;

/// Errors raised by geometry construction, discretization, norm evaluation and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("radius {r} outside (0, {outer}]")]
    RadiusOutOfRange { r: f64, outer: f64 },

    #[error("derivative order {0} is not supported (at most 2)")]
    UnsupportedOrder(usize),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("degenerate Hardy index: p*k = n = {0}")]
    DegenerateHardyIndex(usize),

    #[error("function is not compactly supported away from the mesh endpoints")]
    NotCompactlySupported,

    #[error("operation requires an exact (unperturbed) cone")]
    RequiresExactCone,

    #[error("excluded index: p*i = n for i = {0}")]
    ExcludedIndex(usize),

    #[error("exponent outside the Sobolev range: {0}")]
    SobolevRange(String),

    #[error("annulus ({lo}, {hi}) is not contained in the mesh range [{min}, {max}]")]
    AnnulusOutsideMesh { lo: f64, hi: f64, min: f64, max: f64 },

    #[error("grid functions live on different meshes")]
    MeshMismatch,

    #[error("eigen solver did not converge after {iterations} iterations")]
    EigenNonConvergence { iterations: usize, trace: Vec<f64> },

    #[error("descent did not converge after {iterations} iterations (last residual {last_residual:e})")]
    DescentNonConvergence {
        iterations: usize,
        last_residual: f64,
        trace: Vec<f64>,
    },

    #[error("function must be strictly positive ({0})")]
    NonPositive(String),

    #[error("function is not normalized: integral {actual} but expected {expected}")]
    NotNormalized { actual: f64, expected: f64 },

    #[error("function has non-radial modes")]
    NonRadial,

    #[error("form is not positive definite: smallest eigenvalue {0:e}")]
    IndefiniteForm(f64),

    #[error("fit window contains {nodes} nodes, at least {required} required")]
    WindowTooSmall { nodes: usize, required: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> LabError {
    LabError::InvalidParameter(msg.into())
}
