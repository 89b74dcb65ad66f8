use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::complex::DualComplex;
use super::diagram::{PersistenceDiagram, PersistencePair};

/// One simplex in filtration order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiltrationEntry {
    pub dim: u8,
    /// Index within the complex's list for this dimension.
    pub id: u32,
    /// Lower-star volume fraction at which the simplex enters.
    pub vf: f64,
}

impl FiltrationEntry {
    /// Filtration value `f = 1 - vf`.
    pub fn value(&self) -> f64 {
        1.0 - self.vf
    }
}

/// Simplices ordered by volume fraction descending, then dimension, then
/// lexicographic vertex indices, so faces precede cofaces.
#[derive(Clone, Debug)]
pub struct Filtration<'a> {
    complex: &'a DualComplex,
    entries: Vec<FiltrationEntry>,
}

impl<'a> Filtration<'a> {
    pub fn entries(&self) -> &[FiltrationEntry] {
        &self.entries
    }

    pub fn complex(&self) -> &'a DualComplex {
        self.complex
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn verts<'c>(c: &'c DualComplex, dim: u8, id: u32, buf: &'c mut [u32; 4]) -> &'c [u32] {
    let i = id as usize;
    match dim {
        0 => {
            buf[0] = id;
            &buf[..1]
        }
        1 => &c.edges()[i],
        2 => &c.triangles()[i],
        _ => &c.tetrahedra()[i],
    }
}

pub fn build_filtration(complex: &DualComplex) -> Filtration<'_> {
    let counts = complex.counts();
    let mut entries = Vec::with_capacity(counts.iter().sum());
    for (dim, &n) in counts.iter().enumerate() {
        for id in 0..n as u32 {
            let mut buf = [0; 4];
            let vf = complex.value_of(verts(complex, dim as u8, id, &mut buf));
            entries.push(FiltrationEntry { dim: dim as u8, id, vf });
        }
    }
    entries.sort_by(|a, b| {
        b.vf.partial_cmp(&a.vf).unwrap_or(Ordering::Equal).then(a.dim.cmp(&b.dim)).then_with(|| {
            let (mut ba, mut bb) = ([0; 4], [0; 4]);
            verts(complex, a.dim, a.id, &mut ba).cmp(verts(complex, b.dim, b.id, &mut bb))
        })
    });
    Filtration { complex, entries }
}

fn add_into(col: &mut Vec<u32>, other: &[u32]) {
    let mut out = Vec::with_capacity(col.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < col.len() && j < other.len() {
        match col[i].cmp(&other[j]) {
            Ordering::Less => {
                out.push(col[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(other[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&col[i..]);
    out.extend_from_slice(&other[j..]);
    *col = out;
}

const NONE: u32 = u32::MAX;

/// Column reduction over Z/2 with clearing, processing dimensions from the
/// top down. Zero-persistence pairs are kept.
pub fn reduce(filt: &Filtration<'_>) -> PersistenceDiagram {
    let c = filt.complex;
    let counts = c.counts();
    let total = filt.entries.len();
    let mut position: [Vec<u32>; 4] = [vec![0; counts[0]], vec![0; counts[1]], vec![0; counts[2]], vec![0; counts[3]]];
    let mut by_dim: [Vec<u32>; 4] = Default::default();
    for (p, e) in filt.entries.iter().enumerate() {
        position[e.dim as usize][e.id as usize] = p as u32;
        by_dim[e.dim as usize].push(p as u32);
    }
    let mut cleared = vec![false; total];
    let mut pairs = Vec::new();
    let mut low_owner = vec![NONE; total];
    let top = (0..4).rev().find(|&d| counts[d] > 0).unwrap_or(0);

    for d in (1..=top).rev() {
        let mut stored: Vec<Vec<u32>> = Vec::new();
        for &p in &by_dim[d] {
            if cleared[p as usize] {
                continue;
            }
            let e = filt.entries[p as usize];
            let mut col = boundary(c, &position, e.dim, e.id);
            while let Some(&low) = col.last() {
                let owner = low_owner[low as usize];
                if owner == NONE {
                    break;
                }
                add_into(&mut col, &stored[owner as usize]);
            }
            match col.last() {
                Some(&low) => {
                    low_owner[low as usize] = stored.len() as u32;
                    cleared[low as usize] = true;
                    let birth = filt.entries[low as usize];
                    pairs.push(PersistencePair { dim: d - 1, birth_vf: birth.vf, death_vf: Some(e.vf) });
                    stored.push(col);
                }
                None => pairs.push(PersistencePair { dim: d, birth_vf: e.vf, death_vf: None }),
            }
        }
    }
    for &p in &by_dim[0] {
        if !cleared[p as usize] {
            pairs.push(PersistencePair { dim: 0, birth_vf: filt.entries[p as usize].vf, death_vf: None });
        }
    }
    PersistenceDiagram::new(c.dim(), pairs)
}

fn boundary(c: &DualComplex, position: &[Vec<u32>; 4], dim: u8, id: u32) -> Vec<u32> {
    let i = id as usize;
    let mut col: Vec<u32> = match dim {
        1 => c.edges()[i].iter().map(|&v| position[0][v as usize]).collect(),
        2 => {
            let [a, b, t] = c.triangles()[i];
            [(a, b), (a, t), (b, t)]
                .iter()
                .map(|&(x, y)| position[1][c.edge_id(x, y).expect("triangle edge in complex")])
                .collect()
        }
        3 => {
            let [a, b, t, u] = c.tetrahedra()[i];
            [[a, b, t], [a, b, u], [a, t, u], [b, t, u]]
                .iter()
                .map(|&f| position[2][c.triangle_id(f).expect("tetrahedron face in complex")])
                .collect()
        }
        _ => Vec::new(),
    };
    col.sort_unstable();
    col
}
