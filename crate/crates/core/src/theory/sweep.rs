use alloc::vec;
use alloc::vec::Vec;

use super::polygon::{clip_half_plane, polygon_area};
use super::TheoryError;
use crate::field::{compute_field, VolumeFractionField};
use crate::geom::{Mat3, Vec2, Vec3};
use crate::grid::{Dim, Grid, Site};
use crate::math::PI;
use crate::mesher::{antialiased_components, extract_mesh};
use crate::soup::{polygon_segments, GeometrySoup};

/// Threshold deciding whether a cell or subcell is material.
pub const GAP_THRESHOLD: f64 = 0.5;

/// How volume fractions are obtained for each sweep sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FractionSource {
    /// Winding-number sampling of two large rectangles, `s` samples per axis.
    Sampled { s: usize },
    /// Exact clipped area of each fictitious cell against the half-spaces.
    Exact,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub ell: f64,
    pub l_min: f64,
    pub l_max: f64,
    pub l_count: usize,
    pub theta_count: usize,
    /// Offsets form an `n x n` lattice over `[0, ell)^2`.
    pub offsets_per_axis: usize,
    /// Analysis window in cells per side.
    pub window: usize,
    pub source: FractionSource,
    pub keep_samples: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            ell: 1.0,
            l_min: 0.0,
            l_max: 1.5,
            l_count: 128,
            theta_count: 64,
            offsets_per_axis: 8,
            window: 6,
            source: FractionSource::Exact,
            keep_samples: false,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), TheoryError> {
        if !(self.ell.is_finite() && self.ell > 0.0) {
            return Err(TheoryError::InvalidParameter("cell size must be positive"));
        }
        if !(self.l_min.is_finite() && self.l_max.is_finite() && 0.0 <= self.l_min && self.l_min <= self.l_max) {
            return Err(TheoryError::InvalidParameter("gap range must be finite and non-negative"));
        }
        if self.l_count == 0 || self.theta_count == 0 || self.offsets_per_axis == 0 {
            return Err(TheoryError::InvalidParameter("sample counts must be positive"));
        }
        if self.window < 4 {
            return Err(TheoryError::InvalidParameter("window must be at least 4 cells"));
        }
        if let FractionSource::Sampled { s } = self.source {
            crate::field::check_resolution(s)?;
        }
        Ok(())
    }

    pub fn gap_values(&self) -> Vec<f64> {
        spaced(self.l_min, self.l_max, self.l_count).into_iter().map(|l| l * self.ell).collect()
    }

    pub fn theta_values(&self) -> Vec<f64> {
        spaced(5.0 * PI / 4.0, 3.0 * PI / 2.0, self.theta_count)
    }

    pub fn offset_values(&self) -> Vec<[f64; 2]> {
        let n = self.offsets_per_axis;
        let mut out = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                out.push([i as f64 * self.ell / n as f64, j as f64 * self.ell / n as f64]);
            }
        }
        out
    }

    /// Spacing of the gap values, in units of `ell`.
    pub fn step(&self) -> f64 {
        if self.l_count < 2 {
            0.0
        } else {
            (self.l_max - self.l_min) / (self.l_count - 1) as f64
        }
    }
}

fn spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapClass {
    AlwaysClosed,
    AlwaysOpen,
    Ambiguous,
}

impl GapClass {
    pub fn as_str(self) -> &'static str {
        match self {
            GapClass::AlwaysClosed => "always-closed",
            GapClass::AlwaysOpen => "always-open",
            GapClass::Ambiguous => "ambiguous",
        }
    }

    fn from_counts(closed: usize, open: usize) -> Self {
        match (closed, open) {
            (_, 0) => GapClass::AlwaysClosed,
            (0, _) => GapClass::AlwaysOpen,
            _ => GapClass::Ambiguous,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSample {
    pub l_over_ell: f64,
    pub theta: f64,
    pub offset: [f64; 2],
    pub antialiased: bool,
    /// Material components inside the analysis window.
    pub components: usize,
    /// Material on both sides of the gap is connected.
    pub closed: bool,
}

/// Per-gap-width outcome counts and classes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandRow {
    pub l_over_ell: f64,
    pub plain: GapClass,
    pub antialiased: GapClass,
    pub plain_closed: usize,
    pub plain_open: usize,
    pub aa_closed: usize,
    pub aa_open: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegimeReport {
    pub config: SweepConfig,
    pub rows: Vec<BandRow>,
    /// Every sample, when requested.
    pub samples: Vec<SweepSample>,
}

impl RegimeReport {
    fn class(row: &BandRow, aa: bool) -> GapClass {
        if aa {
            row.antialiased
        } else {
            row.plain
        }
    }

    /// Smallest and largest ambiguous gap, in units of `ell`.
    pub fn ambiguous_band(&self, aa: bool) -> Option<(f64, f64)> {
        let amb: Vec<f64> =
            self.rows.iter().filter(|r| Self::class(r, aa) == GapClass::Ambiguous).map(|r| r.l_over_ell).collect();
        Some((*amb.first()?, *amb.last()?))
    }

    /// Smallest gap with at least one open outcome.
    pub fn first_open(&self, aa: bool) -> Option<f64> {
        self.rows.iter().find(|r| Self::class(r, aa) != GapClass::AlwaysClosed).map(|r| r.l_over_ell)
    }

    /// Largest gap with at least one closed outcome.
    pub fn last_closed(&self, aa: bool) -> Option<f64> {
        self.rows.iter().rev().find(|r| Self::class(r, aa) != GapClass::AlwaysOpen).map(|r| r.l_over_ell)
    }

    pub fn row_at(&self, l_over_ell: f64) -> Option<&BandRow> {
        self.rows.iter().min_by(|a, b| (a.l_over_ell - l_over_ell).abs().total_cmp(&(b.l_over_ell - l_over_ell).abs()))
    }
}

/// The two half-spaces as 20-cell rectangles on either side of the gap.
pub fn gap_soup(ell: f64, gap: f64) -> Result<GeometrySoup, TheoryError> {
    let h = gap / 2.0;
    let (w, t) = (20.0 * ell, 10.0 * ell);
    let mut segs =
        polygon_segments(&[Vec2::new(-h - w, -t), Vec2::new(-h, -t), Vec2::new(-h, t), Vec2::new(-h - w, t)]);
    segs.extend(polygon_segments(&[Vec2::new(h, -t), Vec2::new(h + w, -t), Vec2::new(h + w, t), Vec2::new(h, t)]));
    Ok(GeometrySoup::from_segments(segs)?)
}

/// Window grid rotated so that a cell vertex sits at angle `theta` from its
/// centre, shifted by `offset`.
pub fn gap_grid(ell: f64, window: usize, theta: f64, offset: [f64; 2]) -> Result<Grid, TheoryError> {
    let half = window as f64 * ell / 2.0;
    let origin = Vec3::new(-half + offset[0], -half + offset[1], 0.0);
    Ok(Grid::new(Dim::Two, ell, origin, Mat3::rotation_z(theta - 5.0 * PI / 4.0), [window, window, 1])?)
}

fn site_square(grid: &Grid, s: Site) -> Vec<Vec2> {
    let c = s.0;
    let corners = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
    corners
        .iter()
        .map(|d| grid.to_world(grid.lattice_local([c[0] as f64 + d[0], c[1] as f64 + d[1], 0.0])).xy())
        .collect()
}

fn exact_field(grid: &Grid, gap: f64) -> VolumeFractionField {
    let h = gap / 2.0;
    let area = grid.cell_size() * grid.cell_size();
    VolumeFractionField::from_site_fn(grid, 2, |s| {
        let sq = site_square(grid, s);
        let left = polygon_area(&clip_half_plane(&sq, Vec2::new(1.0, 0.0), -h));
        let right = polygon_area(&clip_half_plane(&sq, Vec2::new(-1.0, 0.0), -h));
        ((left + right) / area).clamp(0.0, 1.0)
    })
}

/// Runs one configuration and classifies it with and without
/// anti-aliasing. The gap is closed when a cell lying wholly in the left
/// half-space connects to one lying wholly in the right.
pub fn gap_sample(cfg: &SweepConfig, gap: f64, theta: f64, offset: [f64; 2]) -> Result<[SweepSample; 2], TheoryError> {
    let grid = gap_grid(cfg.ell, cfg.window, theta, offset)?;
    let field = match cfg.source {
        FractionSource::Exact => exact_field(&grid, gap),
        FractionSource::Sampled { s } => compute_field(&gap_soup(cfg.ell, gap)?, &grid, s)?,
    };
    let h = gap / 2.0;
    let mut left = Vec::new();
    let mut right = Vec::new();
    for idx in 0..grid.cell_count() {
        let c = grid.cell_coords(idx);
        let sq = site_square(&grid, Site::cell_2d(c[0], c[1]));
        if sq.iter().all(|p| p.x < -h) {
            left.push(c);
        } else if sq.iter().all(|p| p.x > h) {
            right.push(c);
        }
    }
    let base =
        SweepSample { l_over_ell: gap / cfg.ell, theta, offset, antialiased: false, components: 0, closed: false };

    let mesh = extract_mesh(&field, GAP_THRESHOLD)?;
    let comps = mesh.components();
    let labels = |cs: &[[usize; 3]]| -> Vec<usize> {
        let mut v: Vec<usize> = cs.iter().filter_map(|&c| comps.label_of_cell(&mesh, c)).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let (l, r) = (labels(&left), labels(&right));
    let plain = SweepSample { components: comps.count, closed: l.iter().any(|x| r.contains(x)), ..base };

    let sites = antialiased_components(&field, GAP_THRESHOLD);
    let labels = |cs: &[[usize; 3]]| -> Vec<usize> {
        let mut v: Vec<usize> = cs.iter().filter_map(|&c| sites.label(&field, Site::cell_2d(c[0], c[1]))).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let (l, r) = (labels(&left), labels(&right));
    let aa =
        SweepSample { antialiased: true, components: sites.count, closed: l.iter().any(|x| r.contains(x)), ..base };
    Ok([plain, aa])
}

/// All `(gap, theta, offset)` triples of a sweep, gap-major.
pub fn sweep_points(cfg: &SweepConfig) -> Vec<(f64, f64, [f64; 2])> {
    let thetas = cfg.theta_values();
    let offsets = cfg.offset_values();
    let mut out = Vec::with_capacity(cfg.l_count * thetas.len() * offsets.len());
    for gap in cfg.gap_values() {
        for &t in &thetas {
            for &o in &offsets {
                out.push((gap, t, o));
            }
        }
    }
    out
}

impl RegimeReport {
    /// Aggregates samples produced in `sweep_points` order.
    pub fn assemble(cfg: &SweepConfig, samples: &[[SweepSample; 2]]) -> Self {
        let per_gap = cfg.theta_count * cfg.offsets_per_axis * cfg.offsets_per_axis;
        let rows = samples
            .chunks(per_gap.max(1))
            .map(|chunk| {
                let count = |aa: usize, closed: bool| chunk.iter().filter(|s| s[aa].closed == closed).count();
                let (pc, po, ac, ao) = (count(0, true), count(0, false), count(1, true), count(1, false));
                BandRow {
                    l_over_ell: chunk[0][0].l_over_ell,
                    plain: GapClass::from_counts(pc, po),
                    antialiased: GapClass::from_counts(ac, ao),
                    plain_closed: pc,
                    plain_open: po,
                    aa_closed: ac,
                    aa_open: ao,
                }
            })
            .collect();
        let samples = if cfg.keep_samples { samples.iter().flatten().copied().collect() } else { Vec::new() };
        Self { config: cfg.clone(), rows, samples }
    }
}

/// Sequential sweep over all configured samples.
pub fn sweep_gap(cfg: &SweepConfig) -> Result<RegimeReport, TheoryError> {
    cfg.validate()?;
    let samples =
        sweep_points(cfg).into_iter().map(|(g, t, o)| gap_sample(cfg, g, t, o)).collect::<Result<Vec<_>, _>>()?;
    Ok(RegimeReport::assemble(cfg, &samples))
}
