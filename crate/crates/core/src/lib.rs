//! Circle dynamics on the boundary of hyperbolic 3-space.
//!
//! The crate is organized bottom-up:
//!
//! - [`geom`]: homogeneous points, Moebius maps and oriented circles on the sphere.
//! - [`modulus`]: conformal moduli of round rings and of two-arc complements.
//! - [`carpet`]: finite round-disk approximations of Sierpinski curves and their slices.
//! - [`slicer`]: the greedy bridge construction extracting Cantor sets of definite modulus.
//! - [`thickness`]: k-thick and globally k-thick certification for subsets of the line.
//! - [`kleinian`]: word enumeration, limit-set clouds and circle orbits.
//! - [`flows`]: geodesic and horocycle flows on frames, return times and RF_k certificates.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geom;
pub mod modulus;
pub mod carpet;
pub mod slicer;
pub mod thickness;
pub mod kleinian;
pub mod flows;
mod serde_ext;
pub mod tolerance;

pub use error::{Error, Result};
pub use geom::{CircleArc, Disk, MoebiusMap, OrientedCircle, Side, SpherePoint};
pub use tolerance::Tolerances;
