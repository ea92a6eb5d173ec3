use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("metric is not positive definite at node {node} (smallest eigenvalue {eigenvalue:e})")]
    MetricDegeneracy { node: usize, eigenvalue: f64 },
    #[error("unsupported valence ({contra},{co}); total rank is capped at {cap}")]
    UnsupportedValence { contra: usize, co: usize, cap: usize },
    #[error("slot position out of range: {0}")]
    PositionOutOfRange(String),
    #[error("integrability exponent q = {0} must be >= 1")]
    InvalidExponent(f64),
    #[error("weight must be positive, found {value:e} at node {node}")]
    NonPositiveWeight { node: usize, value: f64 },
    #[error("jacobian is singular at node {node}")]
    SingularJacobian { node: usize },
    #[error("invalid cusp characteristic: {0}")]
    InvalidCharacteristic(String),
    #[error("non-finite sample: {0}")]
    NonFinite(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("incompatible cusp flavor: {0}")]
    IncompatibleFlavor(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("node {0} is not covered by any chart")]
    UncoveredNode(usize),
    #[error("chart family has {found} members, atlas has {expected} charts")]
    FamilyMismatch { expected: usize, found: usize },
    #[error("ellipticity violated at node {node}: eigenvalue {eigenvalue:e} < {bound:e}")]
    Ellipticity { node: usize, eigenvalue: f64, bound: f64 },
    #[error("linear solve did not converge after {iterations} iterations (relative residual {residual:e})")]
    SolveFailed { iterations: usize, residual: f64 },
    #[error("time step {step} (t = {time}) failed: {source}")]
    StepFailed { step: usize, time: f64, source: Box<Error> },
    #[error("corpus too small: {found} functions, at least {required} required")]
    CorpusTooSmall { found: usize, required: usize },
    #[error("index relation violated: {0}")]
    IndexRelation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
