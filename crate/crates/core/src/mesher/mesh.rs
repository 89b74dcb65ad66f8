use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::MeshError;
use crate::field::VolumeFractionField;
use crate::grid::{Dim, Grid};
use crate::unionfind::UnionFind;

/// Cells are refined one-to-`3^d` by templates; fine coordinates count
/// thirds of a cell.
pub const REFINE: usize = 3;

/// How a mesh element came to exist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Unrefined grid cell.
    GridCell,
    /// Child of a pinch-repair template.
    PinchTemplate,
    /// Child of an archipelago bridge.
    BridgeTemplate,
}

impl Provenance {
    pub fn code(self) -> u8 {
        match self {
            Provenance::GridCell => 0,
            Provenance::PinchTemplate => 1,
            Provenance::BridgeTemplate => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Split {
    pub mask: u32,
    pub provenance: Provenance,
}

/// An axis-aligned square or cube in fine-lattice units.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Element {
    pub lo: [usize; 3],
    /// Side length in fine units: `REFINE` for grid cells, 1 for children.
    pub size: usize,
    pub parent: usize,
    pub provenance: Provenance,
    /// Some neighbour's refinement places nodes on this element's boundary.
    pub hanging: bool,
}

/// Retained grid cells plus any template refinements.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicalMesh {
    grid: Grid,
    threshold: f64,
    retained: Vec<bool>,
    pub(crate) splits: BTreeMap<usize, Split>,
}

/// Connected components of a mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct Components {
    pub count: usize,
    /// Distinct grid cells contributing to each component.
    pub cell_counts: Vec<usize>,
    node_label: Vec<u32>,
    slot: Vec<u32>,
    cells: usize,
    children: usize,
}

const NONE: u32 = u32::MAX;

impl Components {
    fn node(&self, mesh: &CubicalMesh, f: [usize; 3]) -> Option<usize> {
        mesh.node_of_fine(f, &self.slot, self.cells, self.children)
    }

    /// Component of the element covering fine cell `f`.
    pub fn label_of_fine(&self, mesh: &CubicalMesh, f: [usize; 3]) -> Option<usize> {
        self.node(mesh, f).map(|n| self.node_label[n] as usize)
    }

    pub fn label_of_cell(&self, mesh: &CubicalMesh, c: [usize; 3]) -> Option<usize> {
        let f = [c[0] * REFINE + 1, c[1] * REFINE + 1, c[2] * REFINE + if mesh.dim() == Dim::Two { 0 } else { 1 }];
        self.label_of_fine(mesh, f)
    }

    /// Sorted cell counts, largest first.
    pub fn sizes_desc(&self) -> Vec<usize> {
        let mut s = self.cell_counts.clone();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }
}

/// Retains every cell with volume fraction at least `t`.
pub fn extract_mesh(field: &VolumeFractionField, t: f64) -> Result<CubicalMesh, MeshError> {
    if !t.is_finite() {
        return Err(MeshError::InvalidThreshold(t));
    }
    let retained = field.cell_values().into_iter().map(|v| v >= t).collect();
    Ok(CubicalMesh { grid: field.grid().clone(), threshold: t, retained, splits: BTreeMap::new() })
}

impl CubicalMesh {
    /// A mesh from an explicit occupancy, in cell-index order.
    pub fn from_occupancy(grid: &Grid, threshold: f64, retained: Vec<bool>) -> Result<Self, MeshError> {
        if retained.len() != grid.cell_count() {
            return Err(MeshError::OccupancyLength { expected: grid.cell_count(), got: retained.len() });
        }
        Ok(Self { grid: grid.clone(), threshold, retained, splits: BTreeMap::new() })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> Dim {
        self.grid.dim()
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Coarse occupancy, ignoring refinements.
    pub fn retained(&self) -> &[bool] {
        &self.retained
    }

    pub fn is_retained(&self, c: [usize; 3]) -> bool {
        self.retained[self.grid.cell_index(c)]
    }

    pub fn retained_count(&self) -> usize {
        self.retained.iter().filter(|&&r| r).count()
    }

    pub fn split_count(&self) -> usize {
        self.splits.len()
    }

    pub fn is_refined(&self) -> bool {
        !self.splits.is_empty()
    }

    pub(crate) fn children_per_cell(&self) -> usize {
        REFINE.pow(self.dim().n() as u32)
    }

    /// Fine lattice extents.
    pub fn fine_extents(&self) -> [usize; 3] {
        let e = self.grid.extents();
        let mut f = [1; 3];
        for a in 0..self.dim().n() {
            f[a] = e[a] * REFINE;
        }
        f
    }

    fn parent_and_child(&self, f: [usize; 3]) -> ([usize; 3], usize) {
        let d = self.dim().n();
        let mut c = [0; 3];
        let mut child = 0;
        let mut mul = 1;
        for a in 0..d {
            c[a] = f[a] / REFINE;
            child += (f[a] % REFINE) * mul;
            mul *= REFINE;
        }
        (c, child)
    }

    /// Whether fine cell `f` is covered by the mesh.
    pub fn fine_occupied(&self, f: [usize; 3]) -> bool {
        let fe = self.fine_extents();
        if (0..3).any(|a| f[a] >= fe[a]) {
            return false;
        }
        let (c, child) = self.parent_and_child(f);
        let idx = self.grid.cell_index(c);
        match self.splits.get(&idx) {
            Some(s) => s.mask & (1 << child) != 0,
            None => self.retained[idx],
        }
    }

    /// Sets fine cell `f`, refining its parent if needed. Returns whether
    /// anything changed.
    pub(crate) fn set_fine(&mut self, f: [usize; 3], on: bool, provenance: Provenance) -> bool {
        let fe = self.fine_extents();
        if (0..3).any(|a| f[a] >= fe[a]) {
            return false;
        }
        let (c, child) = self.parent_and_child(f);
        let idx = self.grid.cell_index(c);
        let full = (1u32 << self.children_per_cell()) - 1;
        let retained = self.retained[idx];
        let split = self.splits.entry(idx).or_insert(Split { mask: if retained { full } else { 0 }, provenance });
        let before = split.mask;
        if on {
            split.mask |= 1 << child;
        } else {
            split.mask &= !(1 << child);
        }
        if split.mask != before {
            split.provenance = provenance;
        }
        let changed = split.mask != before;
        let mask = split.mask;
        // Collapse refinements that no longer differ from a plain cell. A
        // filled complement cell stays refined to keep its provenance.
        if mask == 0 || (mask == full && retained) {
            self.splits.remove(&idx);
            self.retained[idx] = mask == full;
        }
        changed
    }

    fn node_of_fine(&self, f: [usize; 3], slot: &[u32], cells: usize, children: usize) -> Option<usize> {
        if !self.fine_occupied(f) {
            return None;
        }
        let (c, child) = self.parent_and_child(f);
        let idx = self.grid.cell_index(c);
        match slot[idx] {
            NONE => Some(idx),
            s => Some(cells + s as usize * children + child),
        }
    }

    /// Face-connected components of the covered region.
    pub fn components(&self) -> Components {
        let cells = self.grid.cell_count();
        let children = self.children_per_cell();
        let mut slot = vec![NONE; cells];
        for (i, (&idx, _)) in self.splits.iter().enumerate() {
            slot[idx] = i as u32;
        }
        let total = cells + self.splits.len() * children;
        let mut uf = UnionFind::new(total);
        let d = self.dim().n();
        let ext = self.grid.extents();
        let node = |f: [usize; 3]| self.node_of_fine(f, &slot, cells, children);

        for idx in 0..cells {
            let c = self.grid.cell_coords(idx);
            let split = slot[idx] != NONE;
            if !split && !self.retained[idx] {
                continue;
            }
            if split {
                // Internal child adjacency.
                for ch in 0..children {
                    let local = child_local(ch, d);
                    let f = add(scale(c, d), local);
                    let Some(a) = node(f) else { continue };
                    for ax in 0..d {
                        if local[ax] + 1 < REFINE {
                            let mut g = f;
                            g[ax] += 1;
                            if let Some(b) = node(g) {
                                uf.union(a, b);
                            }
                        }
                    }
                }
            }
            for ax in 0..d {
                if c[ax] + 1 >= ext[ax] {
                    continue;
                }
                let mut n = c;
                n[ax] += 1;
                let nidx = self.grid.cell_index(n);
                let nsplit = slot[nidx] != NONE;
                if !split && !nsplit {
                    if self.retained[nidx] {
                        uf.union(idx, nidx);
                    }
                    continue;
                }
                for_face(d, ax, |face| {
                    let mut fp = add(scale(c, d), face);
                    fp[ax] = c[ax] * REFINE + REFINE - 1;
                    let mut fq = fp;
                    fq[ax] += 1;
                    if let (Some(a), Some(b)) = (node(fp), node(fq)) {
                        uf.union(a, b);
                    }
                });
            }
        }

        let mut node_label = vec![NONE; total];
        let mut count = 0u32;
        let mut present = Vec::new();
        for idx in 0..cells {
            if slot[idx] == NONE {
                if self.retained[idx] {
                    present.push((idx, idx));
                }
            } else {
                let base = cells + slot[idx] as usize * children;
                let mask = self.splits[&idx].mask;
                for ch in 0..children {
                    if mask & (1 << ch) != 0 {
                        present.push((base + ch, idx));
                    }
                }
            }
        }
        let mut root_label = BTreeMap::new();
        let mut cell_counts: Vec<usize> = Vec::new();
        let mut last_parent_in = BTreeMap::new();
        for &(n, parent) in &present {
            let r = uf.find(n);
            let l = *root_label.entry(r).or_insert_with(|| {
                count += 1;
                cell_counts.push(0);
                count - 1
            });
            node_label[n] = l;
            if last_parent_in.insert(l, parent) != Some(parent) {
                cell_counts[l as usize] += 1;
            }
        }
        Components { count: count as usize, cell_counts, node_label, slot, cells, children }
    }

    pub fn component_count(&self) -> usize {
        self.components().count
    }

    /// All mesh elements in cell order, children after their parent's slot.
    pub fn elements(&self) -> Vec<Element> {
        let d = self.dim().n();
        let mut out = Vec::new();
        for idx in 0..self.grid.cell_count() {
            let c = self.grid.cell_coords(idx);
            match self.splits.get(&idx) {
                None if self.retained[idx] => out.push(Element {
                    lo: scale(c, d),
                    size: REFINE,
                    parent: idx,
                    provenance: Provenance::GridCell,
                    hanging: self.has_hanging_nodes(c),
                }),
                None => {}
                Some(s) => {
                    for ch in 0..self.children_per_cell() {
                        if s.mask & (1 << ch) != 0 {
                            out.push(Element {
                                lo: add(scale(c, d), child_local(ch, d)),
                                size: 1,
                                parent: idx,
                                provenance: s.provenance,
                                hanging: false,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// An unrefined cell has hanging nodes when a refined neighbour sharing
    /// a face or an edge has a child touching the shared part.
    fn has_hanging_nodes(&self, c: [usize; 3]) -> bool {
        if self.splits.is_empty() {
            return false;
        }
        let d = self.dim().n();
        let ext = self.grid.extents();
        let offsets = neighbour_offsets(d);
        for off in offsets {
            let nz = off.iter().filter(|&&o| o != 0).count();
            if nz == 0 || nz == d {
                continue;
            }
            let mut n = [0usize; 3];
            let mut ok = true;
            for a in 0..3 {
                let v = c[a] as isize + off[a];
                if a >= d {
                    n[a] = 0;
                } else if v < 0 || v as usize >= ext[a] {
                    ok = false;
                } else {
                    n[a] = v as usize;
                }
            }
            if !ok {
                continue;
            }
            let Some(s) = self.splits.get(&self.grid.cell_index(n)) else { continue };
            for ch in 0..self.children_per_cell() {
                if s.mask & (1 << ch) == 0 {
                    continue;
                }
                let l = child_local(ch, d);
                let touches = (0..d).all(|a| match off[a] {
                    -1 => l[a] == REFINE - 1,
                    1 => l[a] == 0,
                    _ => true,
                });
                if touches {
                    return true;
                }
            }
        }
        false
    }

    /// Retains or clears a coarse cell, dropping any refinement.
    pub(crate) fn set_cell(&mut self, idx: usize, on: bool) {
        self.splits.remove(&idx);
        self.retained[idx] = on;
    }
}

pub(crate) fn child_local(ch: usize, d: usize) -> [usize; 3] {
    let mut l = [0; 3];
    let mut r = ch;
    for v in l.iter_mut().take(d) {
        *v = r % REFINE;
        r /= REFINE;
    }
    l
}

pub(crate) fn scale(c: [usize; 3], d: usize) -> [usize; 3] {
    let mut f = [0; 3];
    for a in 0..d {
        f[a] = c[a] * REFINE;
    }
    f
}

pub(crate) fn add(a: [usize; 3], b: [usize; 3]) -> [usize; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Visits the fine offsets of one face of a cell, with `ax` left at 0.
fn for_face(d: usize, ax: usize, mut f: impl FnMut([usize; 3])) {
    let others: Vec<usize> = (0..d).filter(|&a| a != ax).collect();
    let n = REFINE.pow(others.len() as u32);
    for k in 0..n {
        let mut l = [0; 3];
        let mut r = k;
        for &a in &others {
            l[a] = r % REFINE;
            r /= REFINE;
        }
        f(l);
    }
}

pub(crate) fn neighbour_offsets(d: usize) -> Vec<[isize; 3]> {
    let mut out = Vec::new();
    let range = |a: usize| if a < d { -1..=1 } else { 0..=0 };
    for z in range(2) {
        for y in range(1) {
            for x in range(0) {
                out.push([x, y, z]);
            }
        }
    }
    out
}
