//! Exact decision procedures for injectivity of classes of maps on cosets of
//! a linear subspace.
//!
//! A class of maps is described by a set of matrices (sign patterns, sign-set
//! matrices, interval boxes, scaled classes `diag(κ)·B·diag(λ)`, products and
//! augmentations). Injectivity on cosets of `S` reduces to
//! `ker(𝓑) ∩ S = {0}`, which is decided exactly either through the sign of a
//! symbolic determinant (square case) or through an enumeration of the sign
//! vectors of `S` combined with exact rational feasibility checks.
//!
//! Every verdict carries a certificate that [`injectivity::verify_certificate`]
//! re-checks independently: a singular class member with a kernel vector in
//! `S` for non-injectivity, or a signed monomial / vertex table (or the
//! exhausted sign search) for injectivity.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classes;
mod error;
pub mod injectivity;
pub mod linalg;
mod lp;
pub mod oracle;
pub mod signs;
pub mod symbolic;

pub use classes::{Factor, Grid, IntervalEntry, MatrixClass};
pub use error::{Error, Result};
pub use injectivity::{
    check_injectivity, check_injectivity_with, verify_certificate, CheckConfig, Method, Problem,
    Status, Verdict,
};
pub use linalg::{Matrix, Rational, Subspace};
pub use signs::{Sign, SignSet, SignVector};
