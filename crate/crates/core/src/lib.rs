//! Limited-memory Krylov methods for `f(A) b` where `f` is a Stieltjes
//! function and `A` is symmetric positive definite: two-pass and restarted
//! Lanczos, multi-shift CG on rational approximations, extended Krylov and
//! shift-and-invert Lanczos, with a priori matvec predictions for each.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops mirror the matrix formulas they implement.
#![allow(clippy::needless_range_loop)]

pub mod cg;
pub mod elliptic;
pub mod error;
pub mod experiments;
pub mod lanczos;
pub mod linalg;
pub mod mscg;
pub mod operators;
pub mod predict;
pub mod quadrature;
pub mod rational;
pub mod report;
pub mod restarted;
pub mod stieltjes;
pub mod tridiag;
