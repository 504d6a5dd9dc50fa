//! Numerical laboratory for the operator Jensen–Mercer inequality, its
//! refinements for curvature-bounded and log-convex functions, and
//! quasi-arithmetic operator means of Mercer's type.
//!
//! All operators are dense complex Hermitian matrices. Maps between matrix
//! algebras are positive by construction, and every inequality is checked in
//! the Loewner order with an explicit tolerance and eigenvector witness.

pub mod error;
pub mod funcat;
pub mod harness;
pub mod linalg;
pub mod mercer;
pub mod posmap;
pub mod quasi;

pub use error::{Error, Result};
pub use funcat::{CurvatureBounds, ScalarFunction, SpectralBounds};
pub use linalg::{HermitianOperator, OrderVerdict, Relation};
pub use posmap::{MapFamily, PositiveLinearMap};
