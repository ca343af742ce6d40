// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod certificate;
pub mod error;
pub mod grid;
pub mod model;
pub mod oracles;
pub mod scenario;
pub mod solver;
pub mod transform;

pub use error::{Error, Result};
