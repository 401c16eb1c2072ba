use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series is not a unit: |constant term| = {modulus:e}")]
    NotAUnit { modulus: f64 },
    #[error("substitution has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("map has a singular Jacobian at the origin")]
    SingularJacobian,
    #[error("requested order {requested} exceeds valid order {valid}")]
    OrderExceedsValid { requested: usize, valid: usize },
    #[error("cubic is degenerate at the base point (discriminant {discriminant:e})")]
    Degenerate { discriminant: f64 },
    #[error("cubic vanishes identically at the base point")]
    ZeroCubic,
    #[error("1-form vanishes at the base point")]
    DegenerateForm,
    #[error("adapted chart has residual dz^3/dw^3 coefficients of size {residual:e}")]
    ShapeViolation { residual: f64 },
    #[error("Blaschke curvature vanishes at the base point")]
    BlaschkeFlat,
    #[error("frame is not in adapted position: {0}")]
    NotAdapted(String),
    #[error("random generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },
    #[error("criteria disagree: {0}")]
    InternalInconsistency(String),
    #[error("parse error at position {position}: expected {}", expected.join(" | "))]
    Parse { position: usize, expected: Vec<String> },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
