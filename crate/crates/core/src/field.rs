//! Volume fractions of every cell and subcell.
//!
//! All sites share one sample lattice of spacing `cell_size / s`. A span
//! axis of a site covers the `s` samples of its cell interval; a node axis
//! covers the `s` samples centred on the node, clipped to the domain. The
//! fraction is the mean winding number over the box.

use alloc::vec;
use alloc::vec::Vec;

use crate::grid::{Grid, SampleLattice, Site};
use crate::soup::GeometrySoup;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FieldError {
    #[error("samples per axis must be even and at least 2, got {0}")]
    InvalidResolution(usize),
    #[error("soup and grid dimensions differ")]
    DimensionMismatch,
    #[error("site lies outside the grid")]
    SiteOutOfRange,
    #[error("expected {expected} lattice values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

pub(crate) fn check_resolution(s: usize) -> Result<(), FieldError> {
    if s < 2 || s % 2 == 1 {
        Err(FieldError::InvalidResolution(s))
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VolumeFractionField {
    grid: Grid,
    s: usize,
    values: Vec<f64>,
    boundary_samples: usize,
}

impl VolumeFractionField {
    /// Aggregates precomputed winding numbers, one per lattice sample in
    /// `SampleLattice` order.
    pub fn from_lattice_values(
        grid: &Grid,
        s: usize,
        winding: &[f64],
        boundary_samples: usize,
    ) -> Result<Self, FieldError> {
        check_resolution(s)?;
        let lat = SampleLattice::new(grid, s);
        if winding.len() != lat.len() {
            return Err(FieldError::LengthMismatch { expected: lat.len(), got: winding.len() });
        }
        let values = (0..grid.site_count())
            .map(|idx| {
                let b = lat.site_box(grid.site_at(idx));
                let mut sum = 0.0;
                let mut n = 0usize;
                for k in b[2].0..b[2].1 {
                    for j in b[1].0..b[1].1 {
                        let row = lat.index([0, j, k]);
                        for w in &winding[row + b[0].0..row + b[0].1] {
                            sum += w;
                        }
                        n += b[0].1 - b[0].0;
                    }
                }
                sum / n as f64
            })
            .collect();
        Ok(Self { grid: grid.clone(), s, values, boundary_samples })
    }

    /// Builds a field from an exact per-site fraction.
    pub fn from_site_fn(grid: &Grid, s: usize, mut f: impl FnMut(Site) -> f64) -> Self {
        let values = (0..grid.site_count()).map(|i| f(grid.site_at(i))).collect();
        Self { grid: grid.clone(), s, values, boundary_samples: 0 }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples_per_axis(&self) -> usize {
        self.s
    }

    /// Number of samples flagged as on the soup.
    pub fn boundary_samples(&self) -> usize {
        self.boundary_samples
    }

    pub fn value(&self, site: Site) -> f64 {
        self.values[self.grid.site_index(site)]
    }

    pub fn cell_value(&self, c: [usize; 3]) -> f64 {
        self.value(match self.grid.dim() {
            crate::grid::Dim::Two => Site::cell_2d(c[0], c[1]),
            crate::grid::Dim::Three => Site::cell(c),
        })
    }

    /// Values in doubled-lattice order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Top-cell values in cell-index order.
    pub fn cell_values(&self) -> Vec<f64> {
        (0..self.grid.cell_count()).map(|i| self.cell_value(self.grid.cell_coords(i))).collect()
    }

    /// Sites with their values, in doubled-lattice order.
    pub fn iter(&self) -> impl Iterator<Item = (Site, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (self.grid.site_at(i), v))
    }
}

/// Evaluates the winding number at every lattice sample and aggregates.
pub fn compute_field(soup: &GeometrySoup, grid: &Grid, s: usize) -> Result<VolumeFractionField, FieldError> {
    check_resolution(s)?;
    if soup.dim() != grid.dim() {
        return Err(FieldError::DimensionMismatch);
    }
    let lat = SampleLattice::new(grid, s);
    let mut winding = vec![0.0; lat.len()];
    let mut boundary = 0;
    for (i, w) in winding.iter_mut().enumerate() {
        let r = soup.winding(lat.point(i));
        *w = r.value;
        boundary += r.on_boundary as usize;
    }
    VolumeFractionField::from_lattice_values(grid, s, &winding, boundary)
}
