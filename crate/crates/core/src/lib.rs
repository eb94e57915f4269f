//! Numerical laboratory for curve shortening flow in the plane.
//!
//! The crate is `no_std` (it needs `alloc`) and purely computational: curves,
//! flows, Gaussian densities, soliton profiles, breather detection and
//! splicing, and Harnack diagnostics. File formats and the command line live
//! in the `csflab` companion crate.
//!
//! Sign conventions are fixed once for the whole crate: the unit normal is the
//! unit tangent rotated by +90 degrees, the mean curvature vector is `kappa * n`,
//! and a counterclockwise circle of radius `r` has `kappa = 1/r`. With this
//! choice every soliton is a solution of
//!
//! ```text
//! kappa = < lambda * x + omega * J x + e , n >,      J = [[0, -1], [1, 0]]
//! ```
//!
//! so self-shrinkers are `lambda = -1/2`, self-expanders `lambda = 1/2`,
//! translators `e` with `|e| = 1`, and rotators `omega != 0`.
#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` guards are deliberate: they reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Float math comes from `num_traits::Float` (backed by libm). When std is
// anywhere in the build graph its inherent float methods win instead, which
// is why those imports carry `allow(unused_imports)`.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod breather;
pub mod entropy;
mod error;
pub mod flow;
pub mod geometry;
pub mod harnack;
pub mod solitons;

pub use error::{Error, Result};
pub use geometry::{Curve, FlowHistory, IndexShift, Mat2, Similarity, Topology, Vec2};
