use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular basis: |det| = {det:e} is below the threshold {threshold:e}")]
    SingularBasis { det: f64, threshold: f64 },

    #[error("enumeration would produce {requested} items, cap is {cap}")]
    CapExceeded { requested: u128, cap: u128 },

    #[error("dimension mismatch: expected {expected}, found {found} ({context})")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        context: &'static str,
    },

    #[error("translate {index} duplicates translate {first}")]
    DuplicateTranslate { index: usize, first: usize },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("nonlattice input: {0}")]
    NonLatticeInput(String),

    #[error("root refinement did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("polynomial has a root at z = 0")]
    ZeroRoot,

    #[error("no sign change found while bracketing {0}")]
    BracketFailure(&'static str),

    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    #[error("s is within the pole tolerance: |denominator| = {denominator:e}")]
    NearPole { denominator: f64 },

    #[error("possible cancellation between numerator and denominator: {0}")]
    CancellationRisk(String),

    #[error("translate {index} has degenerate coordinate {value} outside the averaging half-width {half_width}")]
    TranslatesOutsideBox {
        index: usize,
        value: f64,
        half_width: f64,
    },

    #[error("displacements {first:?} and {second:?} are too close to bin unambiguously")]
    AmbiguousDisplacements { first: Vec<f64>, second: Vec<f64> },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
