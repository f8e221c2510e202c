use thiserror::Error;

/// Errors surfaced by the numerical kernels.
///
/// Quadrature failures are reported explicitly; no routine is allowed to
/// return a silent NaN.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DunklError {
    #[error("lambda must be strictly positive, got {0}")]
    NonPositiveLambda(f64),
    #[error("resolution too low: {got} nodes requested, minimum is {min}")]
    BadResolution { got: usize, min: usize },
    #[error("argument too large for any accurate evaluation branch: |z| = {0}")]
    ArgumentTooLarge(f64),
    #[error("grid is not symmetric under x -> -x")]
    AsymmetricGrid,
    #[error("point lies on the lattice boundary")]
    BoundaryPoint,
    #[error("integrand does not decay below {required:e} of its peak at the truncation boundary (got {got:e})")]
    TruncationTooTight { got: f64, required: f64 },
    #[error("zero function passed where a nonzero norm is required")]
    ZeroFunction,
    #[error("translation kernel is degenerate at x*t = 0")]
    DegenerateArguments,
    #[error("profile evaluation requested outside the interpolable range at x = {0}")]
    InterpolationOutOfRange(f64),
    #[error("y must be strictly positive, got {0}")]
    NonPositiveY(f64),
    #[error("cone contains no lattice points at x = {0}")]
    EmptyCone(f64),
    #[error("kernel evaluated on the diagonal x = t = {0}")]
    DiagonalPoint(f64),
    #[error("principal-value extrapolants disagree beyond tolerance: spread {0:e}")]
    NonConvergentPV(f64),
    #[error("boundary iterates of Qf do not converge: last distance {0:e}")]
    NonConvergentBoundary(f64),
    #[error("atom rescaling cannot satisfy the sup bound")]
    InfeasibleAtom,
    #[error("quadrature unstable near b = {0}")]
    QuadratureUnstable(f64),
    #[error("comparability precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("evaluation point x = {0} lies inside an excluded interval")]
    InsideExcludedRegion(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, DunklError>;
