//! Numerics for the linear transport equation `ρ_t − u·∇ρ = 0` on a
//! rectangle, with divergence-free velocity fields that vanish near the
//! boundary.
//!
//! The crate is `no_std` (it needs `alloc`). The `parallel` feature pulls
//! in `std` and rayon and spreads per-node work over threads; results are
//! identical with and without it.

#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod analysis;
pub mod characteristics;
mod error;
pub mod fields;
pub mod geometry;
mod math;
mod par;
pub mod weakform;

pub use error::{Error, Result};
pub use math::loglog_slope;
