//! Exact algebra behind bounded-cohomology stability for classical groups.
//!
//! Everything here runs over `Q` or `Q(i)` with exact big-rational
//! arithmetic, so every verification is a decision rather than an estimate.
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

mod arith;
pub mod delta;
pub mod error;
pub mod formed;
pub mod homotopy;
pub mod linalg;
pub mod quillen;
pub mod scalar;
pub mod stability;
pub mod stiefel;
pub mod trace;

pub use error::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use scalar::{Base, Epsilon, FieldSpec, Involution, Scalar};
