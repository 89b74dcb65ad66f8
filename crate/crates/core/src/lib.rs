//! Volume-fraction grids over polygon and triangle soups, lower-star
//! persistent homology on the dual complex, and pinch-free cubical meshing.
//!
//! The crate is `no_std` with `alloc`. File formats, parallel evaluation and
//! the command line live in the `vfmesh` companion crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod field;
pub mod geom;
pub mod grid;
pub mod math;
pub mod mesher;
pub mod persistence;
pub mod soup;
pub mod theory;
mod unionfind;

pub use field::{compute_field, FieldError, VolumeFractionField};
pub use geom::{Aabb, Mat3, Vec2, Vec3};
pub use grid::{Dim, Grid, GridError, GridSpec, Site, SiteKind};
pub use soup::{GeometrySoup, Segment2, SoupError, Triangle3, Winding};
pub use unionfind::UnionFind;
