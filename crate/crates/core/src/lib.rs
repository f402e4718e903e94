//! Numerical toolkit for regularized piecewise-smooth planar systems near a
//! visible fold of the switching manifold.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blowup;
pub mod chini;
pub mod continuation;
pub mod error;
pub mod fit;
pub mod integrate;
pub(crate) mod linalg;
pub mod maps;
pub mod models;
pub mod regfn;

pub use error::{Error, Result};
