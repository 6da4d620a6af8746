//! Numerics for Levinson-style lower bounds on the proportion of zeros of
//! the Riemann zeta function (and Dirichlet L-functions) on the critical line.

// Range checks are written `!(x > a)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arithmetic;
pub mod dirichlet;
pub mod error;
pub mod levinson;
pub mod mollifier;
pub mod moment;
pub mod numeric;
pub mod optimizer;
pub mod polynomial;
pub mod special;
pub mod zeta;

pub use error::{Error, Result};
pub use special::ComplexValue;
