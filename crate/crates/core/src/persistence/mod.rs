//! Lower-star persistent homology of volume fractions on the dual complex.
//!
//! Filtration values are reported as `f = 1 - vf`, so material with larger
//! volume fraction enters first. Internally everything is ordered by `vf`.

mod complex;
mod diagram;
mod reduce;

pub use complex::{dualize, dualize_2d, dualize_3d, DualComplex, VertexOrigin};
pub use diagram::{BettiCurve, PersistenceDiagram, PersistencePair};
pub use reduce::{build_filtration, reduce, Filtration, FiltrationEntry};

use crate::field::VolumeFractionField;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PersistenceError {
    #[error("field dimension does not match the requested dualization")]
    DimensionMismatch,
}

/// Dualizes, filters and reduces in one step.
pub fn compute_persistence(field: &VolumeFractionField) -> PersistenceDiagram {
    let complex = dualize(field);
    reduce(&build_filtration(&complex))
}
