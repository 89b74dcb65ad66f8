use alloc::vec::Vec;

use super::mesh::{CubicalMesh, Provenance, REFINE};
use super::pinch::{block_has_pinch, block_mask, Pinch, PinchKind, Resolution};
use super::MeshError;
use crate::grid::Dim;

/// Fine cell of `cell` that touches the neighbourhood centre, given the
/// cell's offset bits relative to the centre vertex.
fn corner_child(cell: [usize; 3], bits: usize, d: usize) -> [usize; 3] {
    let mut f = [0; 3];
    for a in 0..d {
        let local = if (bits >> a) & 1 == 0 { REFINE - 1 } else { 0 };
        f[a] = cell[a] * REFINE + local;
    }
    f
}

/// Repairs 2D pinches with one-to-nine splits. Separate removes the corner
/// child of each retained cell at the pinch vertex; Connect adds the corner
/// child of each empty cell.
pub fn apply_pinch_templates_2d(mesh: &CubicalMesh, pinches: &[Pinch]) -> Result<CubicalMesh, MeshError> {
    if mesh.dim() != Dim::Two {
        return Err(MeshError::Unsupported3d);
    }
    let mut out = mesh.clone();
    for p in pinches {
        if p.kind != PinchKind::Vertex {
            return Err(MeshError::Unsupported3d);
        }
        let res = p.resolution.ok_or(MeshError::UnresolvedPinch)?;
        for (bits, (&cell, &kept)) in p.cells.iter().zip(&p.retained).enumerate() {
            let f = corner_child(cell, bits, 2);
            match (res, kept) {
                (Resolution::Separate, true) => {
                    out.set_fine(f, false, Provenance::PinchTemplate);
                }
                (Resolution::Connect, false) => {
                    out.set_fine(f, true, Provenance::PinchTemplate);
                }
                _ => {}
            }
        }
    }
    Ok(out)
}

/// Interior fine vertices whose neighbourhood is pinched. On an unrefined
/// mesh the grid vertices are checked directly.
pub fn residual_pinches(mesh: &CubicalMesh) -> Vec<[usize; 3]> {
    let d = mesh.dim().n();
    let mut out = Vec::new();
    if !mesh.is_refined() {
        let e = mesh.grid().extents();
        let occ = |c: [usize; 3]| (0..d).all(|a| c[a] < e[a]) && mesh.is_retained(c);
        for_interior_vertices(d, e, |v| {
            if pinched(d, block_mask(d, v, occ)) {
                out.push(v);
            }
        });
        return out;
    }
    let fe = mesh.fine_extents();
    let occ = |f: [usize; 3]| mesh.fine_occupied(f);
    for_interior_vertices(d, fe, |v| {
        if pinched(d, block_mask(d, v, occ)) {
            out.push(v);
        }
    });
    out
}

pub(crate) fn pinched(d: usize, mask: u8) -> bool {
    if d == 2 {
        mask == 0b1001 || mask == 0b0110
    } else {
        block_has_pinch(mask)
    }
}

pub(crate) fn for_interior_vertices(d: usize, e: [usize; 3], mut f: impl FnMut([usize; 3])) {
    let zr = if d == 3 { 1..e[2] } else { 0..1 };
    for k in zr {
        for j in 1..e[1] {
            for i in 1..e[0] {
                f([i, j, k]);
            }
        }
    }
}
