use thiserror::Error;

/// Crate-wide error type. Domain errors map to CLI exit code 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("D = {0} is not squarefree")]
    NotSquarefree(i64),
    #[error("D = {0} must be an integer greater than 1")]
    NotGreaterThanOne(i64),
    #[error("elements belong to different fields (D = {0} vs D = {1})")]
    MixedFields(i64, i64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("no nonzero generator given for ideal")]
    ZeroIdeal,
    #[error("ideal is not integral")]
    NotIntegral,
    #[error("ideal is not principal")]
    NotPrincipal,
    #[error("continued fraction subject is rational")]
    RationalInput,
    #[error("convergent index {0} is smaller than -1")]
    IndexTooSmall(i64),
    #[error("out of range: {0}")]
    RangeError(String),
    #[error("element is not in the totally positive part of the ideal")]
    NotInIdealPlus,
    #[error("operation supports degree 2 only, got degree {0}")]
    DegreeUnsupported(u32),
    #[error("inconsistent derivation sample: {0}")]
    InconsistentSample(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("degree {0} has no trace levels (r_d = 0)")]
    DegreeTooSmall(u32),
    #[error("no coefficient of the required sign for degree {0}")]
    NoCoefficientOfRequiredSign(u32),
    #[error("degree {0} is outside the lifting bound's range")]
    DegreeTooLarge(u32),
    #[error("missing coefficient b_{1}(2*{0})")]
    MissingCoefficient(u32, u32),
    #[error("multiplier is not a totally positive codifferent element")]
    NotInCodifferent,
    #[error("matrix is not positive definite in every embedding")]
    NotPositiveDefinite,
    #[error("multiplier does not generate the codifferent")]
    NotCodifferentGenerator,
    #[error("matrix entries are not half-integral")]
    NotHalfIntegral,
    #[error("value does not fit the serialization schema: {0}")]
    OutOfRange(String),
    #[error("parse error: {0}")]
    ParseError(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
