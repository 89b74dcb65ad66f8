//! Regular grids with rotation, offset and padding, and the doubled-lattice
//! addressing of their cells and subcells.

use alloc::vec::Vec;

use crate::geom::{Mat3, Vec3};
use crate::math;
use crate::soup::{Elements, GeometrySoup};

/// Default cap on the number of top-dimensional cells.
pub const MAX_CELLS: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    pub const fn n(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GridError {
    #[error("cell size must be positive and finite, got {0}")]
    InvalidCellSize(f64),
    #[error("grid would have {0} cells, above the cap of {1}")]
    TooManyCells(usize, usize),
    #[error("grid extents must be at least one cell on every axis")]
    EmptyExtents,
    #[error("rotation must be finite")]
    InvalidRotation,
}

/// Parameters for fitting a grid to a soup.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub cell_size: f64,
    pub rotation: Mat3,
    pub offset: [f64; 3],
    pub padding: usize,
    pub max_cells: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { cell_size: 1.0, rotation: Mat3::IDENTITY, offset: [0.0; 3], padding: 1, max_cells: MAX_CELLS }
    }
}

/// An axis-aligned lattice in a rotated frame. `world = rotation * local`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    dim: Dim,
    cell_size: f64,
    origin: Vec3,
    rotation: Mat3,
    extents: [usize; 3],
}

impl Grid {
    /// Builds a grid directly from its frame. For 2D grids the third extent
    /// is forced to 1 and the rotation should act in the xy-plane.
    pub fn new(dim: Dim, cell_size: f64, origin: Vec3, rotation: Mat3, extents: [usize; 3]) -> Result<Self, GridError> {
        Self::new_capped(dim, cell_size, origin, rotation, extents, MAX_CELLS)
    }

    fn new_capped(
        dim: Dim,
        cell_size: f64,
        origin: Vec3,
        rotation: Mat3,
        mut extents: [usize; 3],
        max_cells: usize,
    ) -> Result<Self, GridError> {
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(GridError::InvalidCellSize(cell_size));
        }
        if !rotation.0.iter().flatten().all(|v| v.is_finite()) {
            return Err(GridError::InvalidRotation);
        }
        if dim == Dim::Two {
            extents[2] = 1;
        }
        if extents.contains(&0) {
            return Err(GridError::EmptyExtents);
        }
        let count = extents.iter().try_fold(1usize, |acc, &e| acc.checked_mul(e)).unwrap_or(usize::MAX);
        if count > max_cells {
            return Err(GridError::TooManyCells(count, max_cells));
        }
        Ok(Self { dim, cell_size, origin, rotation, extents })
    }

    /// Fits a grid around the soup's bounding box in the rotated frame.
    pub fn build(soup: &GeometrySoup, spec: &GridSpec) -> Result<Self, GridError> {
        let dim = soup.dim();
        let ell = spec.cell_size;
        if !(ell.is_finite() && ell > 0.0) {
            return Err(GridError::InvalidCellSize(ell));
        }
        let rot = spec.rotation;
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        let mut visit = |p: Vec3| {
            let q = rot.apply_transpose(p).to_array();
            for a in 0..3 {
                lo[a] = lo[a].min(q[a]);
                hi[a] = hi[a].max(q[a]);
            }
        };
        match soup.elements() {
            Elements::Segments(s) => s.iter().for_each(|s| {
                visit(s.a.to_vec3());
                visit(s.b.to_vec3());
            }),
            Elements::Triangles(t) => t.iter().flat_map(|t| t.v).for_each(&mut visit),
        }
        let pad = spec.padding as f64;
        let mut origin = [0.0; 3];
        let mut extents = [1usize; 3];
        for a in 0..dim.n() {
            let shift = math::rem_euclid(spec.offset[a], ell);
            origin[a] = lo[a] - pad * ell - shift;
            let span = (hi[a] - lo[a] + shift) / ell;
            let n = math::ceil(span - 1e-9).max(1.0);
            if n > spec.max_cells as f64 {
                return Err(GridError::TooManyCells(usize::MAX, spec.max_cells));
            }
            extents[a] = n as usize + 2 * spec.padding;
        }
        Self::new_capped(dim, ell, Vec3::from_array(origin), rot, extents, spec.max_cells)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn rotation(&self) -> &Mat3 {
        &self.rotation
    }

    pub fn extents(&self) -> [usize; 3] {
        self.extents
    }

    pub fn cell_count(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn cell_index(&self, c: [usize; 3]) -> usize {
        c[0] + self.extents[0] * (c[1] + self.extents[1] * c[2])
    }

    pub fn cell_coords(&self, idx: usize) -> [usize; 3] {
        let [nx, ny, _] = self.extents;
        [idx % nx, (idx / nx) % ny, idx / (nx * ny)]
    }

    /// Sizes of the doubled lattice that addresses all subcells.
    pub fn site_extents(&self) -> [usize; 3] {
        let mut e = [1; 3];
        for a in 0..self.dim.n() {
            e[a] = 2 * self.extents[a] + 1;
        }
        e
    }

    pub fn site_count(&self) -> usize {
        self.site_extents().iter().product()
    }

    pub fn site_index(&self, s: Site) -> usize {
        let e = self.site_extents();
        s.0[0] + e[0] * (s.0[1] + e[1] * s.0[2])
    }

    pub fn site_at(&self, idx: usize) -> Site {
        let [ex, ey, _] = self.site_extents();
        Site([idx % ex, (idx / ex) % ey, idx / (ex * ey)])
    }

    pub fn contains_site(&self, s: Site) -> bool {
        let e = self.site_extents();
        (0..3).all(|a| s.0[a] < e[a])
    }

    /// Grid-frame coordinates of a point.
    pub fn to_local(&self, world: Vec3) -> Vec3 {
        self.rotation.apply_transpose(world)
    }

    pub fn to_world(&self, local: Vec3) -> Vec3 {
        self.rotation.apply(local)
    }

    /// Local coordinates of a doubled-lattice position (half-cell units).
    pub fn lattice_local(&self, a: [f64; 3]) -> Vec3 {
        let h = 0.5 * self.cell_size;
        let mut p = self.origin.to_array();
        for (ax, v) in a.iter().enumerate().take(self.dim.n()) {
            p[ax] += v * h;
        }
        Vec3::from_array(p)
    }

    pub fn site_center(&self, s: Site) -> Vec3 {
        self.to_world(self.lattice_local([s.0[0] as f64, s.0[1] as f64, s.0[2] as f64]))
    }

    pub fn vertex_position(&self, v: [usize; 3]) -> Vec3 {
        self.site_center(Site::vertex(v))
    }
}

/// Subcell type of a site, by the parity of its doubled coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SiteKind {
    Vertex,
    Edge { axis: usize },
    Face { normal: usize },
    Cell,
}

/// A cell of any dimension addressed on the doubled lattice: coordinate
/// `2i + 1` spans `[i, i + 1]`, coordinate `2i` sits at `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site(pub [usize; 3]);

impl Site {
    pub fn cell(c: [usize; 3]) -> Self {
        Self([2 * c[0] + 1, 2 * c[1] + 1, 2 * c[2] + 1])
    }

    pub fn cell_2d(i: usize, j: usize) -> Self {
        Self([2 * i + 1, 2 * j + 1, 0])
    }

    pub fn vertex(v: [usize; 3]) -> Self {
        Self([2 * v[0], 2 * v[1], 2 * v[2]])
    }

    pub fn vertex_2d(i: usize, j: usize) -> Self {
        Self([2 * i, 2 * j, 0])
    }

    /// Edge from vertex `lo` along `axis`.
    pub fn edge(lo: [usize; 3], axis: usize) -> Self {
        let mut s = Self::vertex(lo);
        s.0[axis] += 1;
        s
    }

    pub fn odd_count(self, dim: Dim) -> usize {
        (0..dim.n()).filter(|&a| self.0[a] % 2 == 1).count()
    }

    /// Topological dimension of the subcell.
    pub fn dimension(self, dim: Dim) -> usize {
        self.odd_count(dim)
    }

    pub fn kind(self, dim: Dim) -> SiteKind {
        let odd = |a: usize| self.0[a] % 2 == 1;
        match (dim, self.odd_count(dim)) {
            (_, 0) => SiteKind::Vertex,
            (Dim::Two, 1) => SiteKind::Edge { axis: if odd(0) { 0 } else { 1 } },
            (Dim::Two, _) => SiteKind::Cell,
            (Dim::Three, 1) => SiteKind::Edge { axis: (0..3).find(|&a| odd(a)).unwrap_or(0) },
            (Dim::Three, 2) => SiteKind::Face { normal: (0..3).find(|&a| !odd(a)).unwrap_or(0) },
            (Dim::Three, _) => SiteKind::Cell,
        }
    }

    /// Top-dimensional cell coordinates, if this site is one.
    pub fn as_cell(self, dim: Dim) -> Option<[usize; 3]> {
        (self.odd_count(dim) == dim.n()).then(|| {
            let mut c = [0; 3];
            for (a, v) in c.iter_mut().enumerate().take(dim.n()) {
                *v = self.0[a] / 2;
            }
            c
        })
    }
}

/// The half-step-inset sample lattice with spacing `cell_size / s`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleLattice {
    grid: Grid,
    s: usize,
    counts: [usize; 3],
}

impl SampleLattice {
    pub fn new(grid: &Grid, s: usize) -> Self {
        let mut counts = [1; 3];
        for (a, c) in counts.iter_mut().enumerate().take(grid.dim().n()) {
            *c = grid.extents()[a] * s;
        }
        Self { grid: grid.clone(), s, counts }
    }

    pub fn samples_per_axis(&self) -> usize {
        self.s
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, m: [usize; 3]) -> usize {
        m[0] + self.counts[0] * (m[1] + self.counts[1] * m[2])
    }

    /// World position of sample `idx` in linear order.
    pub fn point(&self, idx: usize) -> Vec3 {
        let [cx, cy, _] = self.counts;
        let m = [idx % cx, (idx / cx) % cy, idx / (cx * cy)];
        let step = 2.0 / self.s as f64;
        let mut a = [0.0; 3];
        for (ax, v) in a.iter_mut().enumerate().take(self.grid.dim().n()) {
            *v = (m[ax] as f64 + 0.5) * step;
        }
        self.grid.to_world(self.grid.lattice_local(a))
    }

    /// Half-open sample-index ranges covering a site, clipped to the domain.
    pub fn site_box(&self, site: Site) -> [(usize, usize); 3] {
        let s = self.s;
        let mut r = [(0, 1); 3];
        for (a, range) in r.iter_mut().enumerate().take(self.grid.dim().n()) {
            let c = site.0[a];
            *range = if c % 2 == 1 {
                let i = c / 2;
                (i * s, (i + 1) * s)
            } else {
                let v = c / 2;
                let lo = (v * s).saturating_sub(s / 2);
                let hi = (v * s + s / 2).min(self.counts[a]);
                (lo, hi)
            };
        }
        r
    }
}

/// World positions of the samples that contribute to `site`.
pub fn sample_points(grid: &Grid, site: Site, s: usize) -> Result<Vec<Vec3>, crate::field::FieldError> {
    crate::field::check_resolution(s)?;
    if !grid.contains_site(site) {
        return Err(crate::field::FieldError::SiteOutOfRange);
    }
    let lat = SampleLattice::new(grid, s);
    let b = lat.site_box(site);
    let mut out = Vec::new();
    for k in b[2].0..b[2].1 {
        for j in b[1].0..b[1].1 {
            for i in b[0].0..b[0].1 {
                out.push(lat.point(lat.index([i, j, k])));
            }
        }
    }
    Ok(out)
}
