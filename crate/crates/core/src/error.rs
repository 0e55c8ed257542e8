use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("subcritical bound violated for nucleus {index}: Z*beta = {value:.6} > {limit:.6}")]
    SubcriticalityViolation { index: usize, value: f64, limit: f64 },

    #[error("coupling cap violated for nucleus {index}: alpha*Z = {value:.6e} > {limit:.6e}")]
    CouplingViolation { index: usize, value: f64, limit: f64 },

    #[error("nuclei {first} and {second} are too close (distance {distance:.3e})")]
    GeometryViolation {
        first: usize,
        second: usize,
        distance: f64,
    },

    #[error("local relativistic parameter {gamma:.6} exceeds 1")]
    GammaOutOfRange { gamma: f64 },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("residual stagnated at {residual:.3e}, above tolerance {tolerance:.3e}; refine the grid")]
    GridTooCoarse { residual: f64, tolerance: f64 },

    #[error("eigendecomposition failed for a {dim}x{dim} matrix")]
    EigendecompositionFailure { dim: usize },

    #[error("extrapolation not converged: {reason}")]
    NotConverged { reason: String },

    #[error("eigenvalue {eigenvalue:.3e} lies within the spectral gap guard {guard:.3e} of zero")]
    GapViolation { eigenvalue: f64, guard: f64 },

    #[error("line search failed at iteration {iteration}")]
    LineSearchFailure { iteration: usize },

    #[error("gamma = {gamma} is not in (0, 2/pi)")]
    GammaSupercritical { gamma: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("no Scott table entry near (kappa, beta) = ({kappa}, {beta})")]
    MissingScottEntry { kappa: f64, beta: f64 },

    #[error("coefficient `{0}` is not set")]
    CoefficientUnset(&'static str),

    #[error("a = {a:.3e} is below h^2 = {h2:.3e}")]
    RegimeViolation { a: f64, h2: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl LabError {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::NoConvergence { .. }
            | LabError::GridTooCoarse { .. }
            | LabError::EigendecompositionFailure { .. }
            | LabError::NotConverged { .. }
            | LabError::GapViolation { .. }
            | LabError::LineSearchFailure { .. } => 3,
            LabError::Io(_) => 1,
            _ => 2,
        }
    }
}
