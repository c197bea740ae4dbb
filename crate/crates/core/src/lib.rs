//! Characteristic-form calculus on flag bundles.
//!
//! The crate is split along the objects the calculus manipulates:
//!
//! * [`combinat`]: partitions, integer sequences, dimension sequences and the
//!   index recipes (conjugation, `ν`, chart pairs) every formula consumes.
//! * [`charpoly`]: exact polynomials in the Chern variables `c_1..c_r`, the
//!   Segre, Schur and generalized Schur polynomials, and Schur-basis
//!   coordinates.
//! * [`rootcalc`]: polynomials in the Chern roots `ξ_1..ξ_r`, universal
//!   bundles of a flag bundle and the expansion of Chern-class expressions.
//! * [`gysin`]: the push-forward formula, an independent Weyl-symmetrizer
//!   oracle, and the derived push-forward statements.
//! * [`conegeom`]: Schur-cone membership and exact two-dimensional ray hulls.
//! * [`formlab`]: a pointwise exterior algebra, curvature tensors, Chern forms
//!   and sampled positivity tests.
//! * [`flagnum`]: flag-bundle charts, induced metrics, universal-bundle
//!   curvature and Monte Carlo fiber integration.
//!
//! Everything symbolic is exact (arbitrary precision rationals). Everything
//! that touches a curvature tensor is `f64`/`Complex<f64>`.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![allow(
    clippy::needless_range_loop,
    clippy::neg_cmp_op_on_partial_ord,
    clippy::should_implement_trait,
    clippy::type_complexity
)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod charpoly;
pub mod combinat;
pub mod conegeom;
pub mod error;
pub mod flagnum;
pub mod formlab;
pub mod gysin;
pub mod linalg;
pub mod poly;
pub mod rng;
pub mod rootcalc;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use num_rational::BigRational;
