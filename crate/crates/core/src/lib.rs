//! Extremal problems in reproducing-kernel Hilbert spaces of analytic functions
//! on the unit disc.
//!
//! The crate is `no_std` (with `alloc`) and purely computational. The default
//! `std` feature only switches elementary float functions from `libm` to the
//! platform library.
//!
//!
//! - [`numerics`]: adaptive Gauss–Legendre, periodic trapezoid and disc
//!   quadrature, plus the exponential integral `E1`.
//! - [`kernels`]: disc and circle points, and the diagonal kernels
//!   `K(z,w) = Σ c_n (z w̄)^n` (Dirichlet, Hardy, the even-biased family `K_a`,
//!   and the weighted Dirichlet spaces `D_s`).
//! - [`gramian`]: the extremal value `γ = sup{Re f(0) : f ∈ N^⊥, ‖f‖ ≤ 1}` from
//!   a Gramian pseudo-inverse, the extremal function, and a polynomial
//!   brute-force oracle.
//! - [`inner`]: Blaschke products, atomic singular inner functions, local
//!   Dirichlet integrals, Carleson's formula and Poisson integrals.
//! - [`atomic`]: closed-form extremal theory for `S_a(z) = exp(-a(1+z)/(1-z))`.
//! - [`conditions`]: zero-set certificates (cluster decompositions, push-out
//!   refinement, condition sums, Carleson entropy).
//! - [`appendix`]: the two-point problem for `K_a` where pushing a zero
//!   outward lowers `γ`.
//!
//! File formats, JSON and the command line live in the `dext` crate.

#![no_std]
// `!(x > 0.0)` style guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod appendix;
pub mod atomic;
pub mod conditions;
pub mod error;
pub mod gramian;
pub mod inner;
pub mod kernels;
pub mod linalg;
pub mod numerics;

pub use error::{Error, Result};
pub use kernels::{CirclePoint, DiagonalKernel, KernelFamily, UnitDiscPoint};

pub use num_complex::Complex64;
