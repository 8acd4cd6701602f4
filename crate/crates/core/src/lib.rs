//! Decomposition of the permutation representation of a wreath product
//! `F wr G` on `V^X` into irreducible invariant projectors.

pub mod cli;
pub mod correlate;
pub mod dense;
pub mod error;
pub mod fixtures;
pub mod localdata;
pub mod maporbits;
pub mod oracle;
pub mod perm;
pub mod report;
pub mod scalars;
pub mod tensorpoly;
pub mod wreathring;

pub use error::{Error, Result};
