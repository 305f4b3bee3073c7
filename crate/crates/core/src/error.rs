use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {index} out of range for sequence `{name}` (defined for {first}..{end})")]
    IndexOutOfRange { name: &'static str, index: usize, first: usize, end: usize },
    #[error("lambda_{0} vanishes")]
    ZeroLambda(usize),
    #[error("pole: {0}")]
    Pole(String),
    #[error("co-dilation at level 0 is vacuous (lambda_0 never enters the recurrence)")]
    VacuousCoDilation,
    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),
    #[error("no associated-family convention reproduces the direct recurrence: {0}")]
    Calibration(String),
    #[error("denominator B_{depth} vanishes at the evaluation point")]
    ZeroDenominator { depth: usize },
    #[error("degenerate homography: AD - BC vanishes identically")]
    DegenerateHomography,
    #[error("root polishing did not converge: {0}")]
    NonConvergence(String),
    #[error("repeated zero near {0}")]
    MultipleZero(f64),
    #[error("singular moment system at order {0}")]
    Singular(usize),
    #[error("integration blow-up at step {step}: {reason}")]
    BlowUp { step: usize, reason: String },
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("not a chain sequence: parameter {index} = {value} leaves (0,1)")]
    NotChain { index: usize, value: f64 },
    #[error("maximal parameter recursion breaks down at index {0}")]
    Breakdown(usize),
    #[error("|delta_{0}| >= 1")]
    Modulus(usize),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("usage: {0}")]
    Usage(String),
}
