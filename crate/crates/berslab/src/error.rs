use thiserror::Error;

/// Errors surfaced by grid construction, chart maps, and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample at index {idx}: {value}")]
    NonFinite { idx: usize, value: f64 },

    #[error("decay violation at {end} end: |{found:e}| exceeds boundary tolerance {tol:e}")]
    DecayViolation { end: &'static str, found: f64, tol: f64 },

    #[error("wrong decay tag: expected {expected}, got {got}")]
    WrongDecay { expected: &'static str, got: &'static str },

    #[error("grid too coarse for derivative order {order} (n = {n})")]
    GridTooCoarse { order: usize, n: usize },

    #[error("invalid exponent p = {0}; expected {1}")]
    InvalidExponent(f64, &'static str),

    #[error("Jacobian positivity failure: min(1 + h) = {0:e}")]
    JacobianPositivity(f64),

    #[error("root combination loses positivity at t = {t}, x = {x}")]
    GeodesicPositivity { t: f64, x: f64 },

    #[error("p-root chart out of range: min f = {0} <= -p = {1}")]
    ChartRange(f64, f64),

    #[error("Picard iteration did not converge after {iters} sweeps (last change {change:e})")]
    PicardDivergence { iters: usize, change: f64 },

    #[error("distinguished solution loses positivity (min y = {0:e}); potential outside the Bers image")]
    PositivityLoss(f64),

    #[error("right-end limit failure: |y(x_max) - 1| = {0:e} exceeds membership tolerance {1:e}")]
    MembershipLimit(f64, f64),

    #[error("test function support touches the boundary layer")]
    SupportViolation,

    #[error("eigensolver did not converge after {0} iterations")]
    EigenDivergence(usize),

    #[error("degenerate Gram determinant: u1 and v2 are collinear")]
    DegenerateGram,

    #[error("input does not integrate to 1 over the window: got {0}")]
    NotNormalized(f64),

    #[error("scattering solve failed at k = {k:?}: {reason}")]
    ScatteringFailure { k: (f64, f64), reason: String },

    #[error("bisection bracket failure: {0}")]
    BracketFailure(String),

    #[error("csv ingestion: {0}")]
    Csv(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
