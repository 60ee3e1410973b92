//! Numerical verification of Mellin-Barnes integral identities.
//!
//! The crate evaluates multidimensional contour integrals of products of
//! Gamma functions along vertical lines and compares them with closed-form
//! right-hand sides from a fixed catalog.

pub mod catalog;
pub mod cli;
pub mod contour;
pub mod error;
pub mod gamma;
pub mod halfplane;
pub mod integrand;
pub mod quadrature;
pub mod report;

pub use error::{Error, Result};
pub use num_complex::Complex64;
