//! Numerical checks of the gap theorem and reproductions of the refinement
//! counterexamples: closed-form cell areas, the gap regime sweep, the
//! non-converging corner and the sharp wedge.

mod area;
mod cases;
mod polygon;
mod sweep;

pub use area::{area_a1, area_a2, cell_polygon, GapScenario};
pub use cases::{
    nonconvergence_case, nonconvergence_soup, wedge_case, wedge_case_with, wedge_soup, IslandInfo, LevelResult,
    WedgeReport, WedgeSetup,
};
pub use polygon::{clip_half_plane, polygon_area};
pub use sweep::{
    gap_grid, gap_sample, gap_soup, sweep_gap, sweep_points, BandRow, FractionSource, GapClass, RegimeReport,
    SweepConfig, SweepSample,
};

use crate::field::FieldError;
use crate::grid::GridError;
use crate::mesher::MeshError;
use crate::soup::SoupError;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TheoryError {
    #[error("angle {0} outside the analysed domain")]
    AngleOutOfDomain(f64),
    #[error("gap width {0} outside the formula's regime")]
    RegimeViolation(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Soup(#[from] SoupError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}
