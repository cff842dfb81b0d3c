use thiserror::Error;

/// Errors raised by library operations. Check failures are not errors; they
/// are reported through [`crate::report::AxiomReport`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not a root: {0}")]
    NotARoot(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("window overflow: degree {0} lies outside window {1}")]
    WindowOverflow(String, u32),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("axiom {axiom} violated: {witness}")]
    Axiom { axiom: String, witness: String },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn axiom(axiom: impl Into<String>, witness: impl Into<String>) -> Self {
        Error::Axiom { axiom: axiom.into(), witness: witness.into() }
    }
}
