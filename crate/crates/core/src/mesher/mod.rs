//! Cubical meshes extracted from volume fractions, with topological repair:
//! pinch detection and templates, archipelago joining and island removal.

mod archipelago;
mod mesh;
mod pinch;
mod subcell;
mod template;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

pub use archipelago::{join_archipelago, remove_islands, JoinReport};
pub use mesh::{extract_mesh, Components, CubicalMesh, Element, Provenance, REFINE};
pub use pinch::{
    block_has_pinch, canonical_mask, classify_pinch, classify_pinches, cube_symmetries, detect_pinches,
    half_edge_pinch_count, half_edge_pinched, pinch_case, resolve_adjacent_conflicts, vertex_pinched, ConflictPolicy,
    ConflictReport, Pinch, PinchKind, Resolution, PINCH_CASES,
};
pub use subcell::{antialiased_components, cell_components, SiteComponents};
pub use template::{apply_pinch_templates_2d, residual_pinches};

use crate::field::VolumeFractionField;
use crate::grid::Dim;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MeshError {
    #[error("threshold must be finite, got {0}")]
    InvalidThreshold(f64),
    #[error("occupancy has {got} entries, grid has {expected} cells")]
    OccupancyLength { expected: usize, got: usize },
    #[error("geometric pinch repair is only implemented in 2D")]
    Unsupported3d,
    #[error("pinch has no resolution")]
    UnresolvedPinch,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RepairOptions {
    pub antialias: bool,
    pub policy: ConflictPolicy,
    /// Bridge components through interior edges (anti-aliasing only).
    pub join: bool,
    pub min_cells: usize,
}

impl Default for RepairOptions {
    fn default() -> Self {
        Self { antialias: true, policy: ConflictPolicy::Separate, join: true, min_cells: 1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepairReport {
    pub threshold: f64,
    pub antialias: bool,
    pub pinches: Vec<Pinch>,
    pub conflicts: ConflictReport,
    /// Component sizes in grid cells, largest first.
    pub components_before: Vec<usize>,
    pub components_after: Vec<usize>,
    pub join: JoinReport,
    pub islands_removed: usize,
    pub residual_pinches: usize,
    pub warnings: Vec<String>,
}

/// Extracts and repairs a mesh: pinches first, then archipelago joining,
/// then island removal. In 3D pinches are classified and reported only.
pub fn mesh_field(
    field: &VolumeFractionField,
    t: f64,
    opts: &RepairOptions,
) -> Result<(CubicalMesh, RepairReport), MeshError> {
    let mut mesh = extract_mesh(field, t)?;
    let components_before = mesh.components().sizes_desc();
    let mut pinches = detect_pinches(&mesh);
    let mut conflicts = ConflictReport::default();
    let mut join = JoinReport::default();
    let mut warnings = Vec::new();
    if opts.antialias {
        classify_pinches(&mut pinches, field, t);
        conflicts = resolve_adjacent_conflicts(&mut pinches, opts.policy);
        match field.grid().dim() {
            Dim::Two => mesh = apply_pinch_templates_2d(&mesh, &pinches)?,
            Dim::Three => {
                if !pinches.is_empty() {
                    warnings.push(format!("{} pinches classified but not repaired in 3D", pinches.len()));
                }
            }
        }
        if opts.join {
            let (joined, rep) = join_archipelago(&mesh, field, t);
            mesh = joined;
            join = rep;
        }
    }
    if opts.min_cells == 0 {
        warnings.push(String::from("min_cells = 0 removes nothing"));
    }
    let (mesh, islands_removed) = remove_islands(&mesh, opts.min_cells);
    let components_after = mesh.components().sizes_desc();
    let residual = residual_pinches(&mesh).len();
    let report = RepairReport {
        threshold: t,
        antialias: opts.antialias,
        pinches,
        conflicts,
        components_before,
        components_after,
        join,
        islands_removed,
        residual_pinches: residual,
        warnings,
    };
    Ok((mesh, report))
}
