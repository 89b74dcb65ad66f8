//! Data-parallel versions of the core's sequential loops. Results are
//! identical to the sequential ones: work is split per sample and gathered
//! in order.

use rayon::prelude::*;
use vfmesh_core::field::FieldError;
use vfmesh_core::grid::SampleLattice;
use vfmesh_core::theory::{gap_sample, sweep_points, RegimeReport, SweepConfig, TheoryError};
use vfmesh_core::{GeometrySoup, Grid, VolumeFractionField};

/// `compute_field` with winding numbers evaluated in parallel.
pub fn compute_field(soup: &GeometrySoup, grid: &Grid, s: usize) -> Result<VolumeFractionField, FieldError> {
    if s < 2 || s % 2 == 1 {
        return Err(FieldError::InvalidResolution(s));
    }
    if soup.dim() != grid.dim() {
        return Err(FieldError::DimensionMismatch);
    }
    let lat = SampleLattice::new(grid, s);
    let w: Vec<(f64, bool)> = (0..lat.len())
        .into_par_iter()
        .map(|i| {
            let r = soup.winding(lat.point(i));
            (r.value, r.on_boundary)
        })
        .collect();
    let boundary = w.iter().filter(|x| x.1).count();
    let values: Vec<f64> = w.into_iter().map(|x| x.0).collect();
    VolumeFractionField::from_lattice_values(grid, s, &values, boundary)
}

/// `sweep_gap` with samples evaluated in parallel.
pub fn sweep_gap(cfg: &SweepConfig) -> Result<RegimeReport, TheoryError> {
    cfg.validate()?;
    let samples =
        sweep_points(cfg).into_par_iter().map(|(g, t, o)| gap_sample(cfg, g, t, o)).collect::<Result<Vec<_>, _>>()?;
    Ok(RegimeReport::assemble(cfg, &samples))
}
