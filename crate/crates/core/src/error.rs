use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("jet order {0} out of range")]
    OrderOutOfRange(usize),
    #[error("direction {index} out of range for {dirs} seeded directions")]
    DirectionOutOfRange { index: usize, dirs: usize },
    #[error("incompatible jets: (order {0}, dirs {1}) vs (order {2}, dirs {3})")]
    IncompatibleJets(usize, usize, usize, usize),
    #[error("multi-index of degree {degree} exceeds jet order {order}")]
    DegreeTooHigh { degree: usize, order: usize },
    #[error("division by near-zero value {0:e}")]
    DivisionByZero(f64),
    #[error("{func} is undefined at {value}")]
    Domain { func: &'static str, value: f64 },

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("`{name}` takes {expected} argument(s), got {found} (byte {offset})")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        offset: usize,
    },
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),
    #[error("expected {expected} coordinate bindings, got {found}")]
    BindingCount { expected: usize, found: usize },

    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("metric is not positive definite at {point:?}")]
    NotPositiveDefinite { point: Vec<f64> },
    #[error("(x, y) outside the Kropina domain: β/(α‖β‖) = {ratio:.3e}, margin {margin}")]
    OutsideDomain { ratio: f64, margin: f64 },
    #[error("‖β‖² = {value:e} is degenerate at {point:?}")]
    DegenerateOneForm { value: f64, point: Vec<f64> },
    #[error("{needed} admissible samples required, got {found}")]
    TooFewSamples { needed: usize, found: usize },
    #[error("wind is not unit: ‖W‖_h = {norm} at {point:?}")]
    NotUnitWind { norm: f64, point: Vec<f64> },
    #[error("Q is not antisymmetric (defect {0:e})")]
    NotAntisymmetric(f64),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("conformal factor φ = {value} is not positive at {point:?}")]
    NonPositiveConformalFactor { value: f64, point: Vec<f64> },
    #[error("space form chart is singular: H = {value} at {point:?}")]
    SingularChart { value: f64, point: Vec<f64> },
}
