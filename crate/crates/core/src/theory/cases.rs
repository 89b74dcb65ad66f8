use alloc::vec::Vec;

use super::TheoryError;
use crate::field::compute_field;
use crate::geom::{Mat3, Vec2, Vec3};
use crate::grid::{Dim, Grid, Site};
use crate::math::{self, PI};
use crate::mesher::{extract_mesh, mesh_field, RepairOptions, RepairReport};
use crate::soup::{polygon_segments, GeometrySoup};

const THRESHOLD: f64 = 0.5;

/// Two triangular blocks meeting at `(corner_x, 0)`: the left one bounded
/// there by a slope −3 edge, the right one by a slope 1 edge.
pub fn nonconvergence_soup(corner_x: f64) -> Result<GeometrySoup, TheoryError> {
    let c = corner_x;
    let mut segs = polygon_segments(&[Vec2::new(c - 2.0, 0.0), Vec2::new(c, 0.0), Vec2::new(c - 0.5, 1.5)]);
    segs.extend(polygon_segments(&[Vec2::new(c, 0.0), Vec2::new(c + 2.0, 0.0), Vec2::new(c + 1.5, 1.5)]));
    Ok(GeometrySoup::from_segments(segs)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelResult {
    pub level: usize,
    pub cell_size: f64,
    /// Components of the unrepaired mesh at threshold one half.
    pub b0: usize,
    /// Volume fraction of the cell containing the corner.
    pub corner_vf: f64,
}

/// Halves the cell size `levels` times on a grid with a vertex at the
/// origin and reports the component count at each level.
pub fn nonconvergence_case(corner_x: f64, levels: usize, s: usize) -> Result<Vec<LevelResult>, TheoryError> {
    if levels < 2 {
        return Err(TheoryError::InvalidParameter("at least two levels are required"));
    }
    if !(corner_x.is_finite() && corner_x > 0.0 && corner_x < 1.0) {
        return Err(TheoryError::InvalidParameter("corner must lie inside the first cell"));
    }
    let soup = nonconvergence_soup(corner_x)?;
    let b = soup.bbox();
    let mut out = Vec::with_capacity(levels);
    for level in 0..levels {
        let h = math::ldexp_neg(level);
        let x0 = (math::floor(b.min.x / h) - 1.0) * h;
        let nx = (math::ceil(b.max.x / h) - math::floor(b.min.x / h)) as usize + 2;
        let ny = math::ceil(b.max.y / h) as usize + 2;
        let grid = Grid::new(Dim::Two, h, Vec3::new(x0, -h, 0.0), Mat3::IDENTITY, [nx, ny, 1])?;
        let field = compute_field(&soup, &grid, s)?;
        let b0 = extract_mesh(&field, THRESHOLD)?.component_count();
        let ci = math::floor((corner_x - x0) / h) as usize;
        let corner_vf = field.value(Site::cell_2d(ci, 1));
        out.push(LevelResult { level, cell_size: h, b0, corner_vf });
    }
    Ok(out)
}

/// Thin triangle with its apex at `apex`, opening angle `alpha` and legs of
/// length `length`, bisected by direction `bisector`.
pub fn wedge_soup(apex: Vec2, alpha: f64, bisector: f64, length: f64) -> Result<GeometrySoup, TheoryError> {
    let a = bisector - alpha / 2.0;
    let b = bisector + alpha / 2.0;
    let p = apex + Vec2::new(math::cos(a), math::sin(a)) * length;
    let q = apex + Vec2::new(math::cos(b), math::sin(b)) * length;
    Ok(GeometrySoup::from_segments(polygon_segments(&[apex, p, q]))?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IslandInfo {
    pub cells: usize,
    /// Distances from the apex to the island's cell centres, in cells.
    pub min_distance: f64,
    pub max_distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WedgeReport {
    pub alpha: f64,
    pub cell_size: f64,
    pub components_pre: usize,
    pub components_post: usize,
    /// Components other than the largest, before repair.
    pub islands: Vec<IslandInfo>,
    /// Predicted island band `[cot(alpha)/2, cot(alpha)]`, in cells.
    pub band: (f64, f64),
    /// Every island lies in the band widened by two cells.
    pub islands_in_band: bool,
    pub repair: RepairReport,
}

/// Placement of the wedge relative to the grid, in cell units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WedgeSetup {
    pub apex: [f64; 2],
    /// Direction of the bisector, radians.
    pub bisector: f64,
    pub legs: f64,
}

impl Default for WedgeSetup {
    fn default() -> Self {
        Self { apex: [0.37, 0.21], bisector: 30.0 * PI / 180.0, legs: 30.0 }
    }
}

/// Meshes a sharp wedge, locates the islands near its apex and repairs
/// them by joining and island removal.
pub fn wedge_case(alpha: f64, ell: f64, s: usize, min_cells: usize) -> Result<WedgeReport, TheoryError> {
    wedge_case_with(alpha, ell, s, min_cells, &WedgeSetup::default())
}

pub fn wedge_case_with(
    alpha: f64,
    ell: f64,
    s: usize,
    min_cells: usize,
    setup: &WedgeSetup,
) -> Result<WedgeReport, TheoryError> {
    if !(alpha > 0.0 && alpha < PI / 2.0) {
        return Err(TheoryError::InvalidParameter("wedge angle must lie in (0, pi/2)"));
    }
    if !(ell.is_finite() && ell > 0.0) {
        return Err(TheoryError::InvalidParameter("cell size must be positive"));
    }
    let apex = Vec2::new(setup.apex[0] * ell, setup.apex[1] * ell);
    let soup = wedge_soup(apex, alpha, setup.bisector, setup.legs * ell)?;
    let b = soup.bbox();
    let x0 = (math::floor(b.min.x / ell) - 1.0) * ell;
    let y0 = (math::floor(b.min.y / ell) - 1.0) * ell;
    let nx = ((math::ceil(b.max.x / ell) * ell - x0) / ell) as usize + 1;
    let ny = ((math::ceil(b.max.y / ell) * ell - y0) / ell) as usize + 1;
    let grid = Grid::new(Dim::Two, ell, Vec3::new(x0, y0, 0.0), Mat3::IDENTITY, [nx, ny, 1])?;
    let field = compute_field(&soup, &grid, s)?;

    let mesh = extract_mesh(&field, THRESHOLD)?;
    let comps = mesh.components();
    let largest = (0..comps.count).max_by_key(|&i| (comps.cell_counts[i], core::cmp::Reverse(i)));
    let mut islands: Vec<IslandInfo> = (0..comps.count)
        .filter(|&i| Some(i) != largest)
        .map(|_| IslandInfo { cells: 0, min_distance: f64::INFINITY, max_distance: 0.0 })
        .collect();
    let island_slot = |l: usize| -> Option<usize> {
        match largest {
            Some(m) if l == m => None,
            Some(m) if l > m => Some(l - 1),
            _ => Some(l),
        }
    };
    for idx in 0..grid.cell_count() {
        let c = grid.cell_coords(idx);
        let Some(l) = comps.label_of_cell(&mesh, c) else { continue };
        let Some(k) = island_slot(l) else { continue };
        let centre = grid.site_center(Site::cell_2d(c[0], c[1])).xy();
        let dist = (centre - apex).norm() / ell;
        let isl = &mut islands[k];
        isl.cells += 1;
        isl.min_distance = isl.min_distance.min(dist);
        isl.max_distance = isl.max_distance.max(dist);
    }
    let cot = 1.0 / math::tan(alpha);
    let band = (0.5 * cot, cot);
    let islands_in_band = islands.iter().all(|i| i.min_distance >= band.0 - 2.0 && i.max_distance <= band.1 + 2.0);

    let opts = RepairOptions { antialias: true, min_cells, ..RepairOptions::default() };
    let (repaired, repair) = mesh_field(&field, THRESHOLD, &opts)?;
    Ok(WedgeReport {
        alpha,
        cell_size: ell,
        components_pre: comps.count,
        components_post: repaired.component_count(),
        islands,
        band,
        islands_in_band,
        repair,
    })
}
