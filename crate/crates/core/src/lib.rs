//! Exact invariant cohomology of hypercomplex Lie algebras and HKT checks.

pub mod catalog;
pub mod cohomology;
pub mod error;
pub mod exterior;
pub mod hkt;
pub mod hypercomplex;
pub mod linalg;
pub mod qdolbeault;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use exterior::{Form, LieAlgebra, Monomial};
pub use scalar::Scalar;
