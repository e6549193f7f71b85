//! Exact Gaussian integration of polynomial × Gaussian functions on `Cᵖ`,
//! orthonormal truncated bases, and a quadrature cross-check.

mod basis;
mod gausspoly;
mod integrand;
mod poly;

pub use basis::{gram_matrix, graded_lex, Basis, BasisDescriptor, BasisIndex, FockVector};
pub use basis::{DEFAULT_MAX_COORDS, DEFAULT_MAX_DEGREE};
pub use gausspoly::{gaussian_volume, real_form_map, GaussPoly, GaussSum, Measure, Moments};
pub use integrand::{
    gauss_hermite, quadrature_integrate, wick_integrate, GaussianIntegrand, DEFAULT_NODES,
    QUADRATURE_MAX_DIM,
};
pub use poly::{Exponent, Poly};
