use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("not a Dep morphism: {0}")]
    NotADepMorphism(String),
    #[error("cap exceeded: {what} exceeds {cap}")]
    CapExceeded { what: String, cap: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),
    #[error("not a join-semilattice: {0}")]
    NotAJsl(String),
    #[error("not join-preserving: {0}")]
    NotJoinPreserving(String),
    #[error("invalid dependency automaton: {0}")]
    InvalidDepAut(String),
    #[error("not an L-covering: {0}")]
    NotACovering(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("not a left word quotient of the reversed language")]
    NotAQuotient,
    #[error("cross-check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn cap_check(what: &str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::CapExceeded { what: format!("{what} ({n})"), cap })
    } else {
        Ok(())
    }
}
