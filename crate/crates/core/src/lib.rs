//! Directed subdifferentials of nonsmooth functions.
//!
//! The crate builds the directed subdifferential of a function at a point in
//! two independent ways:
//!
//! * from directional derivatives alone ([`engine::directed_subdifferential`]),
//!   by recursively restricting `f'(x; ·)` to the affine hyperplanes
//!   `l + span{l}^⊥` and descending one dimension at a time, and
//! * from a known convex structure ([`embedding`]), by embedding convex
//!   polytopes (subdifferentials, quasidifferentials) into the space of
//!   directed sets and subtracting them there.
//!
//! Directed sets live on finite sphere grids ([`geometry::SphereGrid`]); the
//! grid is stored inside every [`DirectedSet`] so that arithmetic between sets
//! sampled on different grids is rejected.
//!
//! Functions are written in a small expression language ([`expr`]) built from
//! affine atoms, `+ - * /`, `min`, `max` and `abs`, for which exact Dini
//! directional derivatives are available structurally.

pub mod directed_set;
pub mod embedding;
pub mod engine;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod json;
mod linalg;

pub use directed_set::{Component, DirectedInterval, DirectedSet, DsComparison};
pub use engine::{DirSubResult, MCertificate, Route};
pub use error::{Error, ErrorKind, Result};
pub use expr::Expr;
pub use geometry::{GridSpec, Polytope, Rotation, SphereGrid};
