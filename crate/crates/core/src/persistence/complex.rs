use alloc::vec::Vec;

use super::PersistenceError;
use crate::field::VolumeFractionField;
use crate::grid::{Dim, Grid, Site};

/// Where a dual vertex comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexOrigin {
    /// Centre of a top-dimensional grid cell, by cell index.
    Cell(usize),
    /// Vertex introduced at an interior lower-dimensional subcell.
    Introduced(Site),
}

/// Simplicial dual complex with one vertex per grid cell plus introduced
/// vertices subdividing each dual face and dual cube.
#[derive(Clone, Debug, PartialEq)]
pub struct DualComplex {
    dim: Dim,
    values: Vec<f64>,
    origins: Vec<VertexOrigin>,
    edges: Vec<[u32; 2]>,
    triangles: Vec<[u32; 3]>,
    tetrahedra: Vec<[u32; 4]>,
}

fn sorted<const N: usize>(mut a: [u32; N]) -> [u32; N] {
    a.sort_unstable();
    a
}

fn clamp_to(v: f64, around: &[f64]) -> f64 {
    let lo = around.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = around.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    v.clamp(lo, hi)
}

impl DualComplex {
    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.values.len()
    }

    /// Volume fraction carried by each dual vertex.
    pub fn vertex_values(&self) -> &[f64] {
        &self.values
    }

    pub fn origins(&self) -> &[VertexOrigin] {
        &self.origins
    }

    pub fn edges(&self) -> &[[u32; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn tetrahedra(&self) -> &[[u32; 4]] {
        &self.tetrahedra
    }

    /// Simplex counts by dimension.
    pub fn counts(&self) -> [usize; 4] {
        [self.values.len(), self.edges.len(), self.triangles.len(), self.tetrahedra.len()]
    }

    /// Lower-star value: the smallest volume fraction among the vertices.
    pub fn value_of(&self, verts: &[u32]) -> f64 {
        verts.iter().map(|&v| self.values[v as usize]).fold(f64::INFINITY, f64::min)
    }

    pub fn edge_id(&self, a: u32, b: u32) -> Option<usize> {
        self.edges.binary_search(&sorted([a, b])).ok()
    }

    pub fn triangle_id(&self, t: [u32; 3]) -> Option<usize> {
        self.triangles.binary_search(&sorted(t)).ok()
    }

    /// Euler characteristic of the sublevel complex `vf >= t`.
    pub fn euler_characteristic_at(&self, t: f64) -> i64 {
        let n0 = self.values.iter().filter(|&&v| v >= t).count() as i64;
        let n1 = self.edges.iter().filter(|e| self.value_of(&e[..]) >= t).count() as i64;
        let n2 = self.triangles.iter().filter(|e| self.value_of(&e[..]) >= t).count() as i64;
        let n3 = self.tetrahedra.iter().filter(|e| self.value_of(&e[..]) >= t).count() as i64;
        n0 - n1 + n2 - n3
    }

    fn finish(mut self) -> Self {
        self.edges.sort_unstable();
        self.edges.dedup();
        self.triangles.sort_unstable();
        self.triangles.dedup();
        self.tetrahedra.sort_unstable();
        self.tetrahedra.dedup();
        self
    }
}

/// Dispatches on the field dimension.
pub fn dualize(field: &VolumeFractionField) -> DualComplex {
    match field.grid().dim() {
        Dim::Two => build_2d(field),
        Dim::Three => build_3d(field),
    }
}

pub fn dualize_2d(field: &VolumeFractionField) -> Result<DualComplex, PersistenceError> {
    match field.grid().dim() {
        Dim::Two => Ok(build_2d(field)),
        Dim::Three => Err(PersistenceError::DimensionMismatch),
    }
}

pub fn dualize_3d(field: &VolumeFractionField) -> Result<DualComplex, PersistenceError> {
    match field.grid().dim() {
        Dim::Three => Ok(build_3d(field)),
        Dim::Two => Err(PersistenceError::DimensionMismatch),
    }
}

fn cell_vertices(field: &VolumeFractionField) -> (Vec<f64>, Vec<VertexOrigin>) {
    let values = field.cell_values();
    let origins = (0..values.len()).map(VertexOrigin::Cell).collect();
    (values, origins)
}

fn cid(g: &Grid, c: [usize; 3]) -> u32 {
    g.cell_index(c) as u32
}

fn build_2d(field: &VolumeFractionField) -> DualComplex {
    let g = field.grid();
    let [nx, ny, _] = g.extents();
    let (mut values, mut origins) = cell_vertices(field);
    let mut edges = Vec::new();
    let mut triangles = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if i + 1 < nx {
                edges.push(sorted([cid(g, [i, j, 0]), cid(g, [i + 1, j, 0])]));
            }
            if j + 1 < ny {
                edges.push(sorted([cid(g, [i, j, 0]), cid(g, [i, j + 1, 0])]));
            }
        }
    }
    for vj in 1..ny {
        for vi in 1..nx {
            let ring =
                [cid(g, [vi - 1, vj - 1, 0]), cid(g, [vi, vj - 1, 0]), cid(g, [vi, vj, 0]), cid(g, [vi - 1, vj, 0])];
            let around: Vec<f64> = ring.iter().map(|&h| values[h as usize]).collect();
            let site = Site::vertex_2d(vi, vj);
            let c = values.len() as u32;
            values.push(clamp_to(field.value(site), &around));
            origins.push(VertexOrigin::Introduced(site));
            for k in 0..4 {
                let (a, b) = (ring[k], ring[(k + 1) % 4]);
                edges.push(sorted([a, c]));
                triangles.push(sorted([a, b, c]));
            }
        }
    }
    DualComplex { dim: Dim::Two, values, origins, edges, triangles, tetrahedra: Vec::new() }.finish()
}

/// The four cells around an interior edge, in cyclic order.
fn edge_ring(g: &Grid, lo: [usize; 3], axis: usize) -> [u32; 4] {
    let (p, q) = ((axis + 1) % 3, (axis + 2) % 3);
    let at = |dp: usize, dq: usize| {
        let mut c = lo;
        c[p] = lo[p] + dp - 1;
        c[q] = lo[q] + dq - 1;
        cid(g, c)
    };
    [at(0, 0), at(1, 0), at(1, 1), at(0, 1)]
}

fn build_3d(field: &VolumeFractionField) -> DualComplex {
    let g = field.grid();
    let n = g.extents();
    let (mut values, mut origins) = cell_vertices(field);
    let mut edges = Vec::new();
    let mut triangles = Vec::new();
    let mut tetrahedra = Vec::new();

    for k in 0..n[2] {
        for j in 0..n[1] {
            for i in 0..n[0] {
                let c = [i, j, k];
                for a in 0..3 {
                    if c[a] + 1 < n[a] {
                        let mut d = c;
                        d[a] += 1;
                        edges.push(sorted([cid(g, c), cid(g, d)]));
                    }
                }
            }
        }
    }

    // Introduced vertex per interior edge, fanned over its dual square.
    let mut edge_centre = alloc::collections::BTreeMap::new();
    for axis in 0..3 {
        let (p, q) = ((axis + 1) % 3, (axis + 2) % 3);
        for k in 0..=n[2] {
            for j in 0..=n[1] {
                for i in 0..=n[0] {
                    let lo = [i, j, k];
                    if lo[axis] >= n[axis] || lo[p] == 0 || lo[p] >= n[p] || lo[q] == 0 || lo[q] >= n[q] {
                        continue;
                    }
                    let ring = edge_ring(g, lo, axis);
                    let around: Vec<f64> = ring.iter().map(|&h| values[h as usize]).collect();
                    let site = Site::edge(lo, axis);
                    let c = values.len() as u32;
                    values.push(clamp_to(field.value(site), &around));
                    origins.push(VertexOrigin::Introduced(site));
                    edge_centre.insert((lo, axis), (c, ring));
                    for t in 0..4 {
                        edges.push(sorted([ring[t], c]));
                        triangles.push(sorted([ring[t], ring[(t + 1) % 4], c]));
                    }
                }
            }
        }
    }

    // Introduced vertex per interior vertex, coned over its subdivided dual cube.
    for k in 1..n[2] {
        for j in 1..n[1] {
            for i in 1..n[0] {
                let v = [i, j, k];
                let mut around = Vec::with_capacity(8);
                for o in 0..8 {
                    let c = [i - 1 + (o & 1), j - 1 + ((o >> 1) & 1), k - 1 + ((o >> 2) & 1)];
                    around.push(values[cid(g, c) as usize]);
                }
                let site = Site::vertex(v);
                let cv = values.len() as u32;
                values.push(clamp_to(field.value(site), &around));
                origins.push(VertexOrigin::Introduced(site));
                for o in 0..8 {
                    let c = [i - 1 + (o & 1), j - 1 + ((o >> 1) & 1), k - 1 + ((o >> 2) & 1)];
                    edges.push(sorted([cid(g, c), cv]));
                }
                for axis in 0..3 {
                    for back in [true, false] {
                        let mut lo = v;
                        if back {
                            lo[axis] -= 1;
                        }
                        let (ce, ring) = edge_centre[&(lo, axis)];
                        edges.push(sorted([ce, cv]));
                        for t in 0..4 {
                            let (a, b) = (ring[t], ring[(t + 1) % 4]);
                            triangles.push(sorted([a, b, cv]));
                            triangles.push(sorted([a, ce, cv]));
                            tetrahedra.push(sorted([a, b, ce, cv]));
                        }
                    }
                }
            }
        }
    }
    DualComplex { dim: Dim::Three, values, origins, edges, triangles, tetrahedra }.finish()
}
