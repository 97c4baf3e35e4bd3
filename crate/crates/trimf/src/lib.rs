//! Exact computer algebra for the L(a,b,c)-graded triangle singularity
//! f = x1^a + x2^b + x3^c.
//!
//! The crate provides arithmetic in the rank-one grading group L(a,b,c),
//! sparse homogeneous polynomials over Q or F_p, degree-labeled matrices
//! and the matrix-factorization contract u·v = f·Id = v·u, projective-cover
//! tables for the domestic weight types, factorization frames with a
//! {0,±1} specialization search, and a combinatorial model of the
//! Auslander-Reiten quiver of vector bundles.

pub mod ar;
pub mod covers;
pub mod field;
pub mod frame;
pub mod gmf;
pub mod lgroup;
pub mod poly;
pub mod verify;

pub use field::{FieldCtx, Scalar};
pub use gmf::{GradedMatrix, MatrixFactorization, VerificationReport};
pub use lgroup::{LElement, WeightTriple};
pub use poly::{GradedPoly, Monomial};
