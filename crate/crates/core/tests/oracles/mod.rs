//! Independent reference implementations used only by tests: ray-parity
//! inside tests, brute-force GF(2) homology of the dual complex, and exact
//! polygon clipping. None of these call into the library's algorithms.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use vfmesh_core::{Grid, Site, Triangle3, Vec2, Vec3, VolumeFractionField};

// ---------------------------------------------------------------- geometry

/// Star-shaped CCW polygon around the origin with `n` vertices.
pub fn star_polygon(n: usize, radii: &[f64]) -> Vec<Vec2> {
    (0..n)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / n as f64;
            let r = radii[i % radii.len()];
            Vec2::new(r * a.cos(), r * a.sin())
        })
        .collect()
}

/// Even-odd ray casting along +x.
pub fn inside_polygon(poly: &[Vec2], p: Vec2) -> bool {
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if x > p.x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Closed, outward-oriented, star-shaped polyhedron: a latitude/longitude
/// sphere with a bumpy radius.
pub fn star_polyhedron(lat: usize, lon: usize) -> Vec<Triangle3> {
    use std::f64::consts::{PI, TAU};
    let radius = |th: f64, ph: f64| 1.0 + 0.3 * (3.0 * ph).sin() * (2.0 * th).cos();
    let point = |th: f64, ph: f64| {
        let r = radius(th, ph);
        Vec3::new(r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos())
    };
    let north = Vec3::new(0.0, 0.0, radius(0.0, 0.0));
    let south = Vec3::new(0.0, 0.0, -radius(PI, 0.0));
    let ring = |i: usize, j: usize| point(PI * i as f64 / lat as f64, TAU * (j % lon) as f64 / lon as f64);
    let mut tris = Vec::new();
    for j in 0..lon {
        tris.push(Triangle3::new(north, ring(1, j), ring(1, j + 1)));
        tris.push(Triangle3::new(south, ring(lat - 1, j + 1), ring(lat - 1, j)));
        for i in 1..lat - 1 {
            let (a, b, c, d) = (ring(i, j), ring(i + 1, j), ring(i + 1, j + 1), ring(i, j + 1));
            tris.push(Triangle3::new(a, b, c));
            tris.push(Triangle3::new(a, c, d));
        }
    }
    tris
}

/// Signed enclosed volume (positive for outward orientation).
pub fn signed_volume(tris: &[Triangle3]) -> f64 {
    tris.iter().map(|t| t.v[0].dot(t.v[1].cross(t.v[2])) / 6.0).sum()
}

/// Even-odd parity of Moller-Trumbore hits along `dir`.
pub fn inside_polyhedron(tris: &[Triangle3], p: Vec3, dir: Vec3) -> bool {
    let mut hits = 0;
    for t in tris {
        let e1 = t.v[1] - t.v[0];
        let e2 = t.v[2] - t.v[0];
        let h = dir.cross(e2);
        let a = e1.dot(h);
        if a.abs() < 1e-14 {
            continue;
        }
        let f = 1.0 / a;
        let s = p - t.v[0];
        let u = f * s.dot(h);
        if !(0.0..=1.0).contains(&u) {
            continue;
        }
        let q = s.cross(e1);
        let v = f * dir.dot(q);
        if v < 0.0 || u + v > 1.0 {
            continue;
        }
        if f * e2.dot(q) > 0.0 {
            hits += 1;
        }
    }
    hits % 2 == 1
}

// ---------------------------------------------------------------- clipping

/// Area of a convex polygon intersected with `{p : n.p <= c}`, by walking
/// the edges and accumulating the shoelace sum of the kept boundary.
pub fn clipped_area(poly: &[Vec2], n: Vec2, c: f64) -> f64 {
    let mut kept: Vec<(f64, f64)> = Vec::new();
    let k = poly.len();
    for i in 0..k {
        let (p, q) = (poly[i], poly[(i + 1) % k]);
        let (dp, dq) = (n.x * p.x + n.y * p.y - c, n.x * q.x + n.y * q.y - c);
        if dp <= 0.0 {
            kept.push((p.x, p.y));
        }
        if (dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0) {
            let s = dp / (dp - dq);
            kept.push((p.x + s * (q.x - p.x), p.y + s * (q.y - p.y)));
        }
    }
    let m = kept.len();
    let twice: f64 = (0..m).map(|i| kept[i].0 * kept[(i + 1) % m].1 - kept[(i + 1) % m].0 * kept[i].1).sum();
    (twice / 2.0).abs()
}

// ---------------------------------------------------------------- homology

/// Explicit dual complex rebuilt from the field: cell centres, one vertex
/// per interior grid vertex (and per interior edge in 3D), values clamped
/// into the range of the cells around them.
pub struct OracleComplex {
    pub values: Vec<f64>,
    /// Maximal simplices; faces are implied.
    pub tops: Vec<Vec<usize>>,
}

fn clamp_around(v: f64, around: &[f64]) -> f64 {
    let lo = around.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = around.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    v.max(lo).min(hi)
}

pub fn oracle_complex(field: &VolumeFractionField) -> OracleComplex {
    let grid = field.grid();
    let e = grid.extents();
    let three = matches!(grid.dim(), vfmesh_core::Dim::Three);
    let nz = if three { e[2] } else { 1 };
    let cell_id = |i: usize, j: usize, k: usize| i + e[0] * (j + e[1] * k);
    let mut values: Vec<f64> = Vec::new();
    for k in 0..nz {
        for j in 0..e[1] {
            for i in 0..e[0] {
                values.push(field.cell_value([i, j, k]));
            }
        }
    }
    let mut tops: Vec<Vec<usize>> = Vec::new();
    // Face-adjacent cell pairs are dual edges, present even on the border.
    for k in 0..nz {
        for j in 0..e[1] {
            for i in 0..e[0] {
                let c = cell_id(i, j, k);
                if i + 1 < e[0] {
                    tops.push(vec![c, cell_id(i + 1, j, k)]);
                }
                if j + 1 < e[1] {
                    tops.push(vec![c, cell_id(i, j + 1, k)]);
                }
                if three && k + 1 < nz {
                    tops.push(vec![c, cell_id(i, j, k + 1)]);
                }
                tops.push(vec![c]);
            }
        }
    }
    if !three {
        for j in 1..e[1] {
            for i in 1..e[0] {
                // Cells around the vertex in cyclic order.
                let ring = [cell_id(i - 1, j - 1, 0), cell_id(i, j - 1, 0), cell_id(i, j, 0), cell_id(i - 1, j, 0)];
                let around: Vec<f64> = ring.iter().map(|&c| values[c]).collect();
                let v = values.len();
                values.push(clamp_around(field.value(Site::vertex_2d(i, j)), &around));
                for q in 0..4 {
                    tops.push(vec![ring[q], ring[(q + 1) % 4], v]);
                }
            }
        }
        return OracleComplex { values, tops };
    }
    // 3D: one vertex per interior edge, its ring of four cells.
    let mut edge_vertex: BTreeMap<Site, (usize, [usize; 4])> = BTreeMap::new();
    for axis in 0..3 {
        let (a, b) = ((axis + 1) % 3, (axis + 2) % 3);
        let mut lo = [0usize; 3];
        for t in 0..e[axis] {
            for u in 1..e[a] {
                for w in 1..e[b] {
                    lo[axis] = t;
                    lo[a] = u;
                    lo[b] = w;
                    let cell = |du: usize, dw: usize| {
                        let mut c = lo;
                        c[a] = u - 1 + du;
                        c[b] = w - 1 + dw;
                        cell_id(c[0], c[1], c[2])
                    };
                    let ring = [cell(0, 0), cell(1, 0), cell(1, 1), cell(0, 1)];
                    let around: Vec<f64> = ring.iter().map(|&c| values[c]).collect();
                    let site = Site::edge(lo, axis);
                    let v = values.len();
                    values.push(clamp_around(field.value(site), &around));
                    edge_vertex.insert(site, (v, ring));
                    for q in 0..4 {
                        tops.push(vec![ring[q], ring[(q + 1) % 4], v]);
                    }
                }
            }
        }
    }
    // One vertex per interior grid vertex; cone over its six edge fans.
    for k in 1..e[2] {
        for j in 1..e[1] {
            for i in 1..e[0] {
                let mut around = Vec::new();
                for dk in 0..2 {
                    for dj in 0..2 {
                        for di in 0..2 {
                            around.push(values[cell_id(i - 1 + di, j - 1 + dj, k - 1 + dk)]);
                        }
                    }
                }
                let v = values.len();
                values.push(clamp_around(field.value(Site::vertex([i, j, k])), &around));
                for axis in 0..3 {
                    for side in 0..2 {
                        let mut lo = [i, j, k];
                        lo[axis] -= 1 - side;
                        let (ev, ring) = edge_vertex[&Site::edge(lo, axis)];
                        for q in 0..4 {
                            tops.push(vec![ring[q], ring[(q + 1) % 4], ev, v]);
                        }
                    }
                }
            }
        }
    }
    OracleComplex { values, tops }
}

impl OracleComplex {
    /// Every face of every maximal simplex, grouped by dimension.
    pub fn closure(&self) -> Vec<BTreeSet<Vec<usize>>> {
        let mut by_dim: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); 4];
        for top in &self.tops {
            let n = top.len();
            for mask in 1u32..(1 << n) {
                let mut face: Vec<usize> = (0..n).filter(|b| mask & (1 << b) != 0).map(|b| top[b]).collect();
                face.sort_unstable();
                by_dim[face.len() - 1].insert(face);
            }
        }
        by_dim
    }

    /// All simplices whose vertices have value >= `t`, grouped by dimension.
    pub fn simplices_at(&self, t: f64) -> Vec<BTreeSet<Vec<usize>>> {
        self.closure()
            .into_iter()
            .map(|set| set.into_iter().filter(|s| s.iter().all(|&v| self.values[v] >= t)).collect())
            .collect()
    }

    pub fn euler_at(&self, t: f64) -> i64 {
        let s = self.simplices_at(t);
        s.iter().enumerate().map(|(d, set)| if d % 2 == 0 { set.len() as i64 } else { -(set.len() as i64) }).sum()
    }

    /// Betti numbers over GF(2) from boundary-matrix ranks; B0 is also
    /// checked against a union-find count.
    pub fn betti_at(&self, t: f64) -> [usize; 3] {
        let s = self.simplices_at(t);
        let index: Vec<BTreeMap<&Vec<usize>, usize>> =
            s.iter().map(|set| set.iter().enumerate().map(|(i, x)| (x, i)).collect()).collect();
        let rank = |d: usize| -> usize {
            // Boundary of d-simplices into (d-1)-simplices.
            if d == 0 || s[d].is_empty() {
                return 0;
            }
            let rows: Vec<Vec<usize>> = s[d]
                .iter()
                .map(|simplex| {
                    (0..simplex.len())
                        .map(|skip| {
                            let face: Vec<usize> =
                                simplex.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                            index[d - 1][&face]
                        })
                        .collect()
                })
                .collect();
            gf2_rank(rows, s[d - 1].len())
        };
        let r: Vec<usize> = (0..4).map(rank).collect();
        let mut b = [0usize; 3];
        for d in 0..3 {
            b[d] = s[d].len() - r[d] - r[d + 1];
        }
        // Union-find cross-check for B0.
        let verts: Vec<usize> = s[0].iter().map(|v| v[0]).collect();
        let mut parent: BTreeMap<usize, usize> = verts.iter().map(|&v| (v, v)).collect();
        fn find(p: &mut BTreeMap<usize, usize>, x: usize) -> usize {
            let mut r = x;
            while p[&r] != r {
                r = p[&r];
            }
            p.insert(x, r);
            r
        }
        let mut comps = verts.len();
        for e in &s[1] {
            let (a, c) = (find(&mut parent, e[0]), find(&mut parent, e[1]));
            if a != c {
                parent.insert(a, c);
                comps -= 1;
            }
        }
        assert_eq!(comps, b[0], "rank and union-find disagree on B0");
        b
    }
}

/// Rank over GF(2) of a sparse 0/1 matrix given as row supports.
pub fn gf2_rank(rows: Vec<Vec<usize>>, ncols: usize) -> usize {
    let words = ncols.div_ceil(64);
    let mut pivots: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    let mut rank = 0;
    for row in rows {
        let mut bits = vec![0u64; words];
        for c in row {
            bits[c / 64] ^= 1 << (c % 64);
        }
        loop {
            let lead = bits
                .iter()
                .enumerate()
                .rev()
                .find(|(_, w)| **w != 0)
                .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize);
            let Some(lead) = lead else { break };
            match pivots.get(&lead) {
                Some(p) => {
                    for (a, b) in bits.iter_mut().zip(p) {
                        *a ^= b;
                    }
                }
                None => {
                    pivots.insert(lead, bits);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

/// Deterministic random field with values on a coarse ladder so that ties
/// occur, built on an axis-aligned grid with the given extents.
pub fn random_field(rng: &mut impl rand::Rng, extents: [usize; 3], three: bool) -> VolumeFractionField {
    use vfmesh_core::{Dim, Mat3};
    let dim = if three { Dim::Three } else { Dim::Two };
    let grid = Grid::new(dim, 1.0, Vec3::ZERO, Mat3::IDENTITY, extents).expect("grid");
    VolumeFractionField::from_site_fn(&grid, 2, |_| f64::from(rng.gen_range(0..=10u8)) / 10.0)
}
