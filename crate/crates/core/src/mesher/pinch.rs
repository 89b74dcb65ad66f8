use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::mesh::CubicalMesh;
use crate::field::VolumeFractionField;
use crate::grid::{Dim, Grid, Site};
use crate::unionfind::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PinchKind {
    /// Cells meet only at a vertex.
    Vertex,
    /// Two diagonal hexahedra share only an edge along `axis`.
    Edge { axis: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Resolution {
    Connect,
    Separate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ConflictPolicy {
    #[default]
    Separate,
    Connect,
    Majority,
}

/// A non-manifold contact in the mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct Pinch {
    pub kind: PinchKind,
    /// Pinch vertex or edge on the doubled lattice.
    pub site: Site,
    /// Cells around the pinch, indexed by offset bits (`x + 2y + 4z`
    /// relative to the low corner of the neighbourhood).
    pub cells: Vec<[usize; 3]>,
    pub retained: Vec<bool>,
    /// Symmetry class of the surrounding 2x2x2 block in 3D (1..=11); 0 in 2D.
    pub case_id: u8,
    pub resolution: Option<Resolution>,
}

/// Summary of conflict resolution across pinch chains.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConflictReport {
    pub chains: usize,
    pub conflicting_chains: usize,
    pub changed: usize,
}

/// Octant occupancy around an interior grid vertex, bit `x + 2y + 4z`.
pub(crate) fn block_mask(d: usize, v: [usize; 3], occ: impl Fn([usize; 3]) -> bool) -> u8 {
    let mut m = 0u8;
    for o in 0..(1usize << d) {
        let mut c = v;
        let mut inside = true;
        for a in 0..d {
            let bit = (o >> a) & 1;
            if v[a] + bit == 0 {
                inside = false;
            } else {
                c[a] = v[a] + bit - 1;
            }
        }
        if inside && occ(c) {
            m |= 1 << o;
        }
    }
    m
}

/// Half-edge at the block centre along `axis`, on side `side` (0 below,
/// 1 above): its four octants hold exactly one diagonal pair.
pub fn half_edge_pinched(mask: u8, axis: usize, side: usize) -> bool {
    let (p, q) = ((axis + 1) % 3, (axis + 2) % 3);
    let bit = |bp: usize, bq: usize| {
        let o = (side << axis) | (bp << p) | (bq << q);
        mask & (1 << o) != 0
    };
    let (a, b, c, d) = (bit(0, 0), bit(1, 0), bit(1, 1), bit(0, 1));
    (a && c && !b && !d) || (b && d && !a && !c)
}

fn groups(set: u8) -> usize {
    let mut uf = UnionFind::new(8);
    for i in 0..8u8 {
        for j in (i + 1)..8u8 {
            let diff = (i ^ j).count_ones();
            if set & (1 << i) != 0 && set & (1 << j) != 0 && diff < 3 {
                uf.union(i as usize, j as usize);
            }
        }
    }
    (0..8).filter(|&i| set & (1 << i) != 0 && uf.find(i) == i).count()
}

/// The block centre is a vertex pinch: the occupied octants or their
/// complement fall apart under face-or-edge adjacency.
pub fn vertex_pinched(mask: u8) -> bool {
    groups(mask) >= 2 || groups(!mask) >= 2
}

pub fn half_edge_pinch_count(mask: u8) -> usize {
    (0..3).flat_map(|a| [(a, 0), (a, 1)]).filter(|&(a, s)| half_edge_pinched(mask, a, s)).count()
}

pub fn block_has_pinch(mask: u8) -> bool {
    vertex_pinched(mask) || half_edge_pinch_count(mask) > 0
}

fn octant_map(perm: [usize; 3], flip: usize) -> [u8; 8] {
    let mut out = [0u8; 8];
    for (o, slot) in out.iter_mut().enumerate() {
        let mut t = 0;
        for a in 0..3 {
            let bit = ((o >> perm[a]) & 1) ^ ((flip >> a) & 1);
            t |= bit << a;
        }
        *slot = t as u8;
    }
    out
}

/// The 48 octant permutations induced by axis permutations and reflections.
pub fn cube_symmetries() -> Vec<[u8; 8]> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(48);
    for perm in PERMS {
        for flip in 0..8 {
            out.push(octant_map(perm, flip));
        }
    }
    out
}

fn apply_symmetry(mask: u8, map: &[u8; 8]) -> u8 {
    (0..8).filter(|&o| mask & (1 << o) != 0).fold(0u8, |m, o| m | (1 << map[o]))
}

/// Smallest mask in the symmetry orbit.
pub fn canonical_mask(mask: u8) -> u8 {
    cube_symmetries().iter().map(|s| apply_symmetry(mask, s)).min().unwrap_or(mask)
}

/// Canonical masks of the eleven pinched classes, in case-id order.
pub const PINCH_CASES: [u8; 11] = [24, 6, 25, 22, 30, 60, 105, 61, 107, 111, 126];

/// Case id (1..=11) of a 2x2x2 block, or `None` if it has no pinch.
pub fn pinch_case(mask: u8) -> Option<u8> {
    let c = canonical_mask(mask);
    PINCH_CASES.iter().position(|&m| m == c).map(|i| i as u8 + 1)
}

fn in_grid(g: &Grid, c: [usize; 3]) -> bool {
    let e = g.extents();
    (0..g.dim().n()).all(|a| c[a] < e[a])
}

/// Finds all pinches of the unrefined mesh: diagonal vertex contacts in
/// 2D; edge and vertex pinches in 3D, one per edge and per vertex.
pub fn detect_pinches(mesh: &CubicalMesh) -> Vec<Pinch> {
    let g = mesh.grid();
    let d = g.dim().n();
    let e = g.extents();
    let occ = |c: [usize; 3]| in_grid(g, c) && mesh.is_retained(c);
    let mut out = Vec::new();
    match g.dim() {
        Dim::Two => {
            for vj in 1..e[1] {
                for vi in 1..e[0] {
                    let v = [vi, vj, 0];
                    let m = block_mask(2, v, occ);
                    if m == 0b1001 || m == 0b0110 {
                        out.push(neighbourhood_pinch(g, v, d, PinchKind::Vertex, Site::vertex(v), m, 0));
                    }
                }
            }
        }
        Dim::Three => {
            for axis in 0..3 {
                let (p, q) = ((axis + 1) % 3, (axis + 2) % 3);
                for k in 0..=e[2] {
                    for j in 0..=e[1] {
                        for i in 0..=e[0] {
                            let lo = [i, j, k];
                            if lo[axis] >= e[axis] || lo[p] == 0 || lo[p] >= e[p] || lo[q] == 0 || lo[q] >= e[q] {
                                continue;
                            }
                            let m = block_mask(3, lo, occ);
                            if !half_edge_pinched(m, axis, 1) {
                                continue;
                            }
                            let case = pinch_case(m).unwrap_or(0);
                            let mut cells = Vec::with_capacity(4);
                            let mut retained = Vec::with_capacity(4);
                            for o in 0..4usize {
                                let mut c = lo;
                                c[p] = lo[p] + (o & 1) - 1;
                                c[q] = lo[q] + ((o >> 1) & 1) - 1;
                                cells.push(c);
                                retained.push(occ(c));
                            }
                            out.push(Pinch {
                                kind: PinchKind::Edge { axis },
                                site: Site::edge(lo, axis),
                                cells,
                                retained,
                                case_id: case,
                                resolution: None,
                            });
                        }
                    }
                }
            }
            for k in 1..e[2] {
                for j in 1..e[1] {
                    for i in 1..e[0] {
                        let v = [i, j, k];
                        let m = block_mask(3, v, occ);
                        if vertex_pinched(m) {
                            let case = pinch_case(m).unwrap_or(0);
                            out.push(neighbourhood_pinch(g, v, d, PinchKind::Vertex, Site::vertex(v), m, case));
                        }
                    }
                }
            }
        }
    }
    out
}

fn neighbourhood_pinch(
    _g: &Grid,
    v: [usize; 3],
    d: usize,
    kind: PinchKind,
    site: Site,
    mask: u8,
    case_id: u8,
) -> Pinch {
    let n = 1usize << d;
    let mut cells = Vec::with_capacity(n);
    let mut retained = Vec::with_capacity(n);
    for o in 0..n {
        let mut c = v;
        for a in 0..d {
            c[a] = v[a] + ((o >> a) & 1) - 1;
        }
        cells.push(c);
        retained.push(mask & (1 << o) != 0);
    }
    Pinch { kind, site, cells, retained, case_id, resolution: None }
}

/// Connect when the pinch vertex or edge is interior at `t`.
pub fn classify_pinch(p: &Pinch, field: &VolumeFractionField, t: f64) -> Resolution {
    if field.value(p.site) >= t {
        Resolution::Connect
    } else {
        Resolution::Separate
    }
}

pub fn classify_pinches(pinches: &mut [Pinch], field: &VolumeFractionField, t: f64) {
    for p in pinches.iter_mut() {
        p.resolution = Some(classify_pinch(p, field, t));
    }
}

/// Chains are groups of pinches sharing a neighbourhood cell. A chain with
/// mixed resolutions is made uniform by `policy`; majority ties separate.
pub fn resolve_adjacent_conflicts(pinches: &mut [Pinch], policy: ConflictPolicy) -> ConflictReport {
    let mut uf = UnionFind::new(pinches.len());
    let mut first_owner: BTreeMap<[usize; 3], usize> = BTreeMap::new();
    for (i, p) in pinches.iter().enumerate() {
        for c in &p.cells {
            match first_owner.get(c) {
                Some(&j) => {
                    uf.union(i, j);
                }
                None => {
                    first_owner.insert(*c, i);
                }
            }
        }
    }
    let mut chains: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..pinches.len() {
        chains.entry(uf.find(i)).or_default().push(i);
    }
    let mut report = ConflictReport { chains: chains.len(), ..Default::default() };
    for members in chains.values() {
        let connects = members.iter().filter(|&&i| pinches[i].resolution == Some(Resolution::Connect)).count();
        let separates = members.iter().filter(|&&i| pinches[i].resolution == Some(Resolution::Separate)).count();
        if connects == 0 || separates == 0 {
            continue;
        }
        report.conflicting_chains += 1;
        let winner = match policy {
            ConflictPolicy::Separate => Resolution::Separate,
            ConflictPolicy::Connect => Resolution::Connect,
            ConflictPolicy::Majority if connects > separates => Resolution::Connect,
            ConflictPolicy::Majority => Resolution::Separate,
        };
        for &i in members {
            if pinches[i].resolution != Some(winner) {
                pinches[i].resolution = Some(winner);
                report.changed += 1;
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eleven_of_twenty_two_classes_pinch() {
        let mut classes: Vec<u8> = (0..=255u8).map(canonical_mask).collect();
        classes.sort_unstable();
        classes.dedup();
        assert_eq!(classes.len(), 22);
        let mut pinched: Vec<u8> = classes.into_iter().filter(|&m| block_has_pinch(m)).collect();
        assert_eq!(pinched.len(), 11);
        let mut expected = PINCH_CASES.to_vec();
        expected.sort_unstable();
        pinched.sort_unstable();
        assert_eq!(pinched, expected);
    }

    #[test]
    fn body_diagonal_is_case_one() {
        assert_eq!(pinch_case(0b1000_0001), Some(1));
        assert!(vertex_pinched(0b1000_0001));
        assert_eq!(half_edge_pinch_count(0b1000_0001), 0);
        assert_eq!(pinch_case(0b0000_0001), None);
    }

    #[test]
    fn checkerboard_has_six_half_edges() {
        assert_eq!(half_edge_pinch_count(0b0110_1001), 6);
        assert!(!vertex_pinched(0b0110_1001));
        assert_eq!(pinch_case(0b0110_1001), Some(7));
    }
}
