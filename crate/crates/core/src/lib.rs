//! Regular languages through the lens of finite relations and
//! join-semilattices: dependency relations, join-semilattice automata,
//! canonical residual and saturated machines, syntactic algebra and exact
//! NFA minimisation by biclique covers.

pub mod algebra;
pub mod automata;
pub mod bits;
pub mod canonical;
pub mod cli;
pub mod error;
pub mod finrel;
pub mod jsl;
pub mod jsldfa;
pub mod kw;
pub mod lang;
pub mod saturate;

pub use error::{Error, Result};
