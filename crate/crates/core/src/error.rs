use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed network text.
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    /// Well-formed text (or a constructed model) that violates a model invariant.
    #[error("{0}")]
    Invalid(String),

    #[error("n = {n} exceeds the enumeration cap of {cap} nodes")]
    CapExceeded { n: usize, cap: usize },

    #[error("observation scheme is empty")]
    EmptyScheme,

    #[error("node x{node} is not an XOR function")]
    NotXor { node: usize },

    /// A generator or claim was called with parameters outside its domain.
    #[error("constraint violated: {0}")]
    Constraint(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::CapExceeded { n, cap })
    } else {
        Ok(())
    }
}
