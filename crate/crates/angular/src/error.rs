use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid index: j must be nonzero")]
    InvalidIndex,

    #[error("non-polynomial input: degree {0} < 1")]
    NonPolynomial(isize),

    #[error("root iteration did not converge after {iterations} iterations")]
    RootsNotConverged {
        iterations: usize,
        best: Vec<Complex64>,
    },

    #[error("bracket invalid: f({a}) = {fa}, f({b}) = {fb} have the same sign")]
    BracketInvalid { a: f64, b: f64, fa: f64, fb: f64 },

    #[error("step size underflow at t = {t} (last good state {state:?})")]
    StepUnderflow { t: f64, state: Vec<f64> },

    #[error("integration exceeded {0} steps")]
    TooManySteps(usize),

    #[error("quadrature did not converge: estimate {estimate}, error {error}")]
    QuadratureNotConverged { estimate: f64, error: f64 },

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("tracking failure, reduce step: {0}")]
    TrackingFailure(String),

    #[error("resonant pair ({m},{n}) needs level {level}, which is beyond the table budget")]
    ResonanceUnresolved { m: usize, n: usize, level: usize },

    #[error("coefficient bound violated at ({m},{n}): |{value}| > {bound}")]
    BoundViolated { m: usize, n: usize, value: f64, bound: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("internal consistency: {0}")]
    Consistency(String),

    #[error("characteristic coordinates singular: mu^2 = nu^2")]
    CharacteristicSingular,

    #[error("points not connected by a characteristic: {0}")]
    Unreachable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
