//! Finite-truncation models of infinite-dimensional classical groups and
//! their Gaussian-measure representations, with certified identity checks.

pub mod certificate;
pub mod error;
pub mod gaussint;
pub mod gaussrep;
pub mod groups;
pub mod io;
pub mod linalg;
pub mod matrixfn;
pub mod sampling;
pub mod spherical;
pub mod tensorrep;

pub use certificate::{Certificate, Verdict};
pub use error::{Error, Result};
