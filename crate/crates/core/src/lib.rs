//! Numerical laboratory for variable-order Lévy exponents, Dirichlet-form
//! grid discretizations, recurrence and explosion classifiers, and
//! resolvent-convergence diagnostics.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop, clippy::excessive_precision)]

pub mod classify;
pub mod coeffs;
pub mod error;
pub mod forms;
pub mod invariants;
pub mod levy;
pub mod linalg;
pub mod mosco;
pub mod quad;
pub mod scenario;
pub mod tolerances;

pub use error::{Error, Result};
