use alloc::vec::Vec;

use super::TheoryError;
use crate::geom::Vec2;
use crate::math::{self, PI};

/// Two half-spaces `x <= -L/2` and `x >= L/2` and a grid cell of side `ell`
/// centred between them, with a vertex at angle `theta` from the centre.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapScenario {
    pub ell: f64,
    pub gap: f64,
    pub theta: f64,
    pub offset: [f64; 2],
}

impl GapScenario {
    /// Centre-to-vertex distance of the cell.
    pub fn r(&self) -> f64 {
        math::sqrt(2.0) * self.ell / 2.0
    }
}

/// Vertices of the cell centred at `centre`, counter-clockwise, starting at
/// angle `theta`.
pub fn cell_polygon(centre: Vec2, ell: f64, theta: f64) -> Vec<Vec2> {
    let r = math::sqrt(2.0) * ell / 2.0;
    (0..4)
        .map(|k| {
            let a = theta + k as f64 * PI / 2.0;
            centre + Vec2::new(r * math::cos(a), r * math::sin(a))
        })
        .collect()
}

const EPS: f64 = 1e-12;

fn check_common(l: f64, ell: f64) -> Result<(), TheoryError> {
    if !(ell.is_finite() && ell > 0.0) {
        return Err(TheoryError::InvalidParameter("cell size must be positive"));
    }
    if !(l.is_finite() && l >= 0.0) {
        return Err(TheoryError::RegimeViolation(l));
    }
    Ok(())
}

/// Area of the cell on one side of the gap while the cut is a
/// parallelogram plus a triangle (`L/2 <= -r cos theta`).
pub fn area_a1(theta: f64, l: f64, ell: f64) -> Result<f64, TheoryError> {
    check_common(l, ell)?;
    if !(5.0 * PI / 4.0 - EPS..3.0 * PI / 2.0).contains(&theta) {
        return Err(TheoryError::AngleOutOfDomain(theta));
    }
    let r = math::sqrt(2.0) * ell / 2.0;
    let (s, c) = (math::sin(theta), math::cos(theta));
    if l / 2.0 > -r * c + EPS {
        return Err(TheoryError::RegimeViolation(l));
    }
    Ok(r * (l + r * c + r * s) / (c + s))
}

/// Area of the cell on one side of the gap while the cut is a single
/// corner triangle (`L/2 >= -r cos theta`). Zero once the gap clears the
/// cell.
pub fn area_a2(theta: f64, l: f64, ell: f64) -> Result<f64, TheoryError> {
    check_common(l, ell)?;
    if !(theta > 5.0 * PI / 4.0 && theta <= 3.0 * PI / 2.0 + EPS) {
        return Err(TheoryError::AngleOutOfDomain(theta));
    }
    let r = math::sqrt(2.0) * ell / 2.0;
    let (s, c) = (math::sin(theta), math::cos(theta));
    if l / 2.0 < -r * c - EPS {
        return Err(TheoryError::RegimeViolation(l));
    }
    let depth = -(l / 2.0 + r * s);
    if depth <= 0.0 {
        return Ok(0.0);
    }
    Ok(-(depth * depth) / math::cos(2.0 * theta))
}
