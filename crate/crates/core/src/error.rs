use thiserror::Error;

/// Errors raised anywhere in the laboratory.
///
/// Variants map onto the failure modes of the individual stages so that the
/// harness can report which stage failed and pick an exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("diffusion coefficient is negative ({value}) at t = {t}, x = {x}")]
    NonpositiveDiffusion { t: f64, x: f64, value: f64 },

    #[error("coefficient `{name}` is not finite at t = {t}, x = {x}")]
    NonfiniteCoefficient { name: &'static str, t: f64, x: f64 },

    #[error("boundary functional evaluated to a negative value ({0})")]
    NegativeBoundaryFunctional(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("profile has {got} values but the grid has {expected} nodes")]
    ProfileLength { expected: usize, got: usize },

    #[error("profile contains a non-finite value at node {0}")]
    NonfiniteProfile(usize),

    #[error("invalid disturbance signal: {0}")]
    InvalidSignal(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid coefficient bounds: {0}")]
    InvalidBounds(String),

    #[error("no certificate verifies: {0}")]
    InfeasibleCertificate(String),

    #[error("time went backwards: update at {t} after {last}")]
    NonmonotoneTime { t: f64, last: f64 },

    #[error("invalid tracker input {0} (must be finite and non-negative)")]
    InvalidTrackerInput(f64),

    #[error("boundary denominator {0:e} is degenerate")]
    DegenerateDenominator(f64),

    #[error("boundary sign condition does not hold: {0}")]
    BoundarySignViolated(String),

    #[error("invalid gain function: {0}")]
    InvalidGainFunction(String),

    #[error("decay rate zeta = {zeta} is not admissible for sigma = {sigma}")]
    InvalidZeta { zeta: f64, sigma: f64 },

    #[error("singular boundary solve (coefficient {0:e})")]
    SingularBoundarySolve(f64),

    #[error("solution blew up at t = {t} (sup norm {norm:e})")]
    BlowUp { t: f64, norm: f64 },

    #[error("step budget of {0} steps exceeded")]
    StepBudgetExceeded(usize),

    #[error("value {value} lies outside the transform table [{lo}, {hi}]")]
    TableDomainExceeded { value: f64, lo: f64, hi: f64 },

    #[error("invalid transform table: {0}")]
    InvalidTable(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Io(err.to_string())
    }
}
