use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use super::mesh::{add, child_local, scale, CubicalMesh, Provenance, REFINE};
use super::pinch::block_mask;
use super::template::pinched;
use crate::field::VolumeFractionField;
use crate::grid::Site;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct JoinReport {
    /// Number of bridges built.
    pub bridges: usize,
    /// Grid edges covered by bridges.
    pub bridge_edges: usize,
    /// Fine cells added to clear pinches left at bridge ends.
    pub filled_cells: usize,
}

struct VertexLattice {
    d: usize,
    ext: [usize; 3],
}

impl VertexLattice {
    fn index(&self, v: [usize; 3]) -> usize {
        v[0] + self.ext[0] * (v[1] + self.ext[1] * v[2])
    }

    fn coords(&self, i: usize) -> [usize; 3] {
        [i % self.ext[0], (i / self.ext[0]) % self.ext[1], i / (self.ext[0] * self.ext[1])]
    }

    fn len(&self) -> usize {
        self.ext.iter().product()
    }
}

/// Path length and the lattice steps of a bridge.
type Route = (usize, Vec<([usize; 3], usize)>);

/// Joins components through paths of interior grid edges and vertices,
/// nearest pair first (ties by component id), until no path remains.
/// Each bridge adds the fine cells on both sides of every path edge.
pub fn join_archipelago(mesh: &CubicalMesh, field: &VolumeFractionField, t: f64) -> (CubicalMesh, JoinReport) {
    let mut out = mesh.clone();
    let mut report = JoinReport::default();
    let g = mesh.grid().clone();
    let d = g.dim().n();
    let e = g.extents();
    let mut ve = [1; 3];
    for a in 0..d {
        ve[a] = e[a] + 1;
    }
    let lat = VertexLattice { d, ext: ve };
    let vertex_inside: Vec<bool> = (0..lat.len()).map(|i| field.value(Site::vertex(lat.coords(i))) >= t).collect();
    let edge_inside = |v: [usize; 3], a: usize| v[a] < e[a] && field.value(Site::edge(v, a)) >= t;

    let max_rounds = mesh.component_count();
    for _ in 0..max_rounds {
        let comps = out.components();
        if comps.count < 2 {
            break;
        }
        let touching: Vec<Vec<u32>> = (0..lat.len())
            .map(|i| {
                let v = lat.coords(i);
                let mut s = BTreeSet::new();
                for o in 0..(1usize << d) {
                    let mut f = [0; 3];
                    let mut ok = true;
                    for a in 0..d {
                        let bit = (o >> a) & 1;
                        if v[a] * REFINE + bit == 0 {
                            ok = false;
                        } else {
                            f[a] = v[a] * REFINE + bit - 1;
                        }
                    }
                    if ok {
                        if let Some(l) = comps.label_of_fine(&out, f) {
                            s.insert(l as u32);
                        }
                    }
                }
                s.into_iter().collect()
            })
            .collect();

        let mut best: Option<Route> = None;
        for a_comp in 0..comps.count as u32 {
            let limit = best.as_ref().map_or(usize::MAX, |b| b.0);
            if let Some((dist, path)) = nearest_from(&lat, a_comp, &touching, &vertex_inside, &edge_inside, limit) {
                if best.as_ref().is_none_or(|b| dist < b.0) {
                    best = Some((dist, path));
                }
            }
        }
        let Some((_, path)) = best else { break };
        report.bridges += 1;
        report.bridge_edges += path.len();
        let mut touched = Vec::new();
        for &(v, axis) in &path {
            bridge_edge(&mut out, v, axis, &mut touched);
        }
        report.filled_cells += cleanup(&mut out, touched);
    }
    (out, report)
}

/// BFS from the interior vertices touching component `a`. Returns the path
/// (as edges `(low vertex, axis)`) to the nearest vertex touching another
/// component, at distance at least one.
fn nearest_from(
    lat: &VertexLattice,
    a: u32,
    touching: &[Vec<u32>],
    inside: &[bool],
    edge_inside: &impl Fn([usize; 3], usize) -> bool,
    limit: usize,
) -> Option<Route> {
    const UNSEEN: u32 = u32::MAX;
    let mut dist = vec![UNSEEN; lat.len()];
    let mut parent = vec![(usize::MAX, 0usize); lat.len()];
    let mut frontier: Vec<usize> = (0..lat.len()).filter(|&i| inside[i] && touching[i].contains(&a)).collect();
    for &i in &frontier {
        dist[i] = 0;
    }
    let mut level = 0;
    while !frontier.is_empty() && level < limit {
        level += 1;
        let mut next = Vec::new();
        let mut hits: Vec<(u32, usize)> = Vec::new();
        for &i in &frontier {
            let v = lat.coords(i);
            for ax in 0..lat.d {
                for up in [true, false] {
                    let (lo, w) = if up {
                        if v[ax] + 1 >= lat.ext[ax] {
                            continue;
                        }
                        let mut w = v;
                        w[ax] += 1;
                        (v, w)
                    } else {
                        if v[ax] == 0 {
                            continue;
                        }
                        let mut w = v;
                        w[ax] -= 1;
                        (w, w)
                    };
                    let wi = lat.index(w);
                    if dist[wi] != UNSEEN || !inside[wi] || !edge_inside(lo, ax) {
                        continue;
                    }
                    dist[wi] = level as u32;
                    parent[wi] = (i, ax);
                    next.push(wi);
                    if let Some(&b) = touching[wi].iter().find(|&&b| b != a) {
                        hits.push((b, wi));
                    }
                }
            }
        }
        if let Some(&(_, end)) = hits.iter().min() {
            let mut path = Vec::new();
            let mut cur = end;
            while dist[cur] != 0 {
                let (prev, ax) = parent[cur];
                let (pv, cv) = (lat.coords(prev), lat.coords(cur));
                path.push((if pv[ax] < cv[ax] { pv } else { cv }, ax));
                cur = prev;
            }
            path.reverse();
            return Some((level, path));
        }
        next.sort_unstable();
        frontier = next;
    }
    None
}

fn bridge_edge(mesh: &mut CubicalMesh, v: [usize; 3], axis: usize, touched: &mut Vec<[usize; 3]>) {
    let d = mesh.dim().n();
    let perp: Vec<usize> = (0..d).filter(|&a| a != axis).collect();
    for m in 0..REFINE {
        for side in 0..(1usize << perp.len()) {
            let mut f = [0; 3];
            f[axis] = v[axis] * REFINE + m;
            let mut ok = true;
            for (k, &p) in perp.iter().enumerate() {
                let bit = (side >> k) & 1;
                if v[p] * REFINE + bit == 0 {
                    ok = false;
                } else {
                    f[p] = v[p] * REFINE + bit - 1;
                }
            }
            if ok && mesh.set_fine(f, true, Provenance::BridgeTemplate) {
                touched.push(f);
            }
        }
    }
}

/// Fills fine neighbourhoods that became pinched near `touched` cells.
fn cleanup(mesh: &mut CubicalMesh, mut touched: Vec<[usize; 3]>) -> usize {
    let d = mesh.dim().n();
    let fe = mesh.fine_extents();
    let mut filled = 0;
    let mut queue: VecDeque<[usize; 3]> = VecDeque::new();
    let push_corners = |f: [usize; 3], q: &mut VecDeque<[usize; 3]>| {
        for o in 0..(1usize << d) {
            let mut v = f;
            for a in 0..d {
                v[a] += (o >> a) & 1;
            }
            if (0..d).all(|a| v[a] >= 1 && v[a] < fe[a]) {
                q.push_back(v);
            }
        }
    };
    for f in touched.drain(..) {
        push_corners(f, &mut queue);
    }
    while let Some(v) = queue.pop_front() {
        let mask = block_mask(d, v, |f| mesh.fine_occupied(f));
        if !pinched(d, mask) {
            continue;
        }
        for o in 0..(1usize << d) {
            if mask & (1 << o) != 0 {
                continue;
            }
            let mut f = v;
            for a in 0..d {
                f[a] = v[a] + ((o >> a) & 1) - 1;
            }
            if mesh.set_fine(f, true, Provenance::BridgeTemplate) {
                filled += 1;
                push_corners(f, &mut queue);
            }
        }
    }
    filled
}

/// Deletes components made of fewer than `min_cells` grid cells. Returns
/// the new mesh and the number of components removed.
pub fn remove_islands(mesh: &CubicalMesh, min_cells: usize) -> (CubicalMesh, usize) {
    let comps = mesh.components();
    let doomed: Vec<bool> = comps.cell_counts.iter().map(|&n| n < min_cells).collect();
    let removed = doomed.iter().filter(|&&x| x).count();
    if removed == 0 {
        return (mesh.clone(), 0);
    }
    let mut out = mesh.clone();
    let g = mesh.grid();
    let d = g.dim().n();
    let per = REFINE.pow(d as u32);
    for idx in 0..g.cell_count() {
        let c = g.cell_coords(idx);
        if mesh.splits.contains_key(&idx) {
            for ch in 0..per {
                let f = add(scale(c, d), child_local(ch, d));
                if let Some(l) = comps.label_of_fine(mesh, f) {
                    if doomed[l] {
                        let prov = mesh.splits[&idx].provenance;
                        out.set_fine(f, false, prov);
                    }
                }
            }
        } else if mesh.retained()[idx] {
            if let Some(l) = comps.label_of_cell(mesh, c) {
                if doomed[l] {
                    out.set_cell(idx, false);
                }
            }
        }
    }
    (out, removed)
}
