//! Segment and triangle soups with generalized winding numbers.
//!
//! Soups need not be closed, manifold or consistently oriented. The winding
//! number is well defined away from the soup and is used directly as the
//! occupancy weight of a sample.

use alloc::vec::Vec;

use crate::geom::{Aabb, Vec2, Vec3};
use crate::grid::Dim;
use crate::math::{self, PI};

/// Relative on-boundary tolerance, scaled by the bounding-box diagonal.
pub const ON_BOUNDARY_REL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment2 {
    pub a: Vec2,
    pub b: Vec2,
}

impl Segment2 {
    pub const fn new(a: Vec2, b: Vec2) -> Self {
        Self { a, b }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Triangle3 {
    pub v: [Vec3; 3],
}

impl Triangle3 {
    pub const fn new(a: Vec3, b: Vec3, c: Vec3) -> Self {
        Self { v: [a, b, c] }
    }

    fn area2(&self) -> f64 {
        (self.v[1] - self.v[0]).cross(self.v[2] - self.v[0]).norm()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Elements {
    Segments(Vec<Segment2>),
    Triangles(Vec<Triangle3>),
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SoupError {
    #[error("geometry has no non-degenerate elements")]
    Empty,
    #[error("non-finite coordinate in element {0}")]
    NonFinite(usize),
    #[error("query dimension does not match a {0:?} soup")]
    DimensionMismatch(Dim),
}

/// Winding number at a point, with an on-boundary flag. The value is never
/// clamped or rounded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Winding {
    pub value: f64,
    pub on_boundary: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeometrySoup {
    elements: Elements,
    bbox: Aabb,
    tau_on: f64,
    dropped: usize,
}

impl GeometrySoup {
    /// Builds a 2D soup. Zero-length segments are dropped and counted.
    pub fn from_segments(segments: Vec<Segment2>) -> Result<Self, SoupError> {
        let mut kept = Vec::with_capacity(segments.len());
        let mut dropped = 0;
        for (i, s) in segments.into_iter().enumerate() {
            if !(s.a.x.is_finite() && s.a.y.is_finite() && s.b.x.is_finite() && s.b.y.is_finite()) {
                return Err(SoupError::NonFinite(i));
            }
            if s.a == s.b {
                dropped += 1;
            } else {
                kept.push(s);
            }
        }
        let bbox =
            Aabb::from_points(kept.iter().flat_map(|s| [s.a.to_vec3(), s.b.to_vec3()])).ok_or(SoupError::Empty)?;
        Ok(Self::finish(Elements::Segments(kept), bbox, dropped))
    }

    /// Builds a 3D soup. Zero-area triangles are dropped and counted.
    pub fn from_triangles(triangles: Vec<Triangle3>) -> Result<Self, SoupError> {
        let mut kept = Vec::with_capacity(triangles.len());
        let mut dropped = 0;
        for (i, t) in triangles.into_iter().enumerate() {
            if !t.v.iter().all(|v| v.is_finite()) {
                return Err(SoupError::NonFinite(i));
            }
            if t.area2() == 0.0 {
                dropped += 1;
            } else {
                kept.push(t);
            }
        }
        let bbox = Aabb::from_points(kept.iter().flat_map(|t| t.v)).ok_or(SoupError::Empty)?;
        Ok(Self::finish(Elements::Triangles(kept), bbox, dropped))
    }

    fn finish(elements: Elements, bbox: Aabb, dropped: usize) -> Self {
        let tau_on = ON_BOUNDARY_REL * bbox.diagonal();
        Self { elements, bbox, tau_on, dropped }
    }

    pub fn dim(&self) -> Dim {
        match self.elements {
            Elements::Segments(_) => Dim::Two,
            Elements::Triangles(_) => Dim::Three,
        }
    }

    pub fn elements(&self) -> &Elements {
        &self.elements
    }

    pub fn len(&self) -> usize {
        match &self.elements {
            Elements::Segments(s) => s.len(),
            Elements::Triangles(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn bbox(&self) -> Aabb {
        self.bbox
    }

    /// Number of degenerate elements discarded at construction.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn on_boundary_tolerance(&self) -> f64 {
        self.tau_on
    }

    /// Winding number at `p`; the z coordinate is ignored for 2D soups.
    pub fn winding(&self, p: Vec3) -> Winding {
        match &self.elements {
            Elements::Segments(s) => winding_segments(s, p.xy(), self.tau_on),
            Elements::Triangles(t) => winding_triangles(t, p, self.tau_on),
        }
    }
}

pub fn winding_number_2d(p: Vec2, soup: &GeometrySoup) -> Result<Winding, SoupError> {
    match &soup.elements {
        Elements::Segments(s) => Ok(winding_segments(s, p, soup.tau_on)),
        Elements::Triangles(_) => Err(SoupError::DimensionMismatch(Dim::Three)),
    }
}

pub fn winding_number_3d(p: Vec3, soup: &GeometrySoup) -> Result<Winding, SoupError> {
    match &soup.elements {
        Elements::Triangles(t) => Ok(winding_triangles(t, p, soup.tau_on)),
        Elements::Segments(_) => Err(SoupError::DimensionMismatch(Dim::Two)),
    }
}

fn winding_segments(segments: &[Segment2], p: Vec2, tau: f64) -> Winding {
    let mut sum = 0.0;
    let mut on_boundary = false;
    for s in segments {
        let a = s.a - p;
        let b = s.b - p;
        sum += math::atan2(a.cross(b), a.dot(b));
        if !on_boundary && point_segment_distance(p, s) <= tau {
            on_boundary = true;
        }
    }
    Winding { value: sum / (2.0 * PI), on_boundary }
}

fn winding_triangles(triangles: &[Triangle3], p: Vec3, tau: f64) -> Winding {
    let mut sum = 0.0;
    let mut on_boundary = false;
    for t in triangles {
        let a = t.v[0] - p;
        let b = t.v[1] - p;
        let c = t.v[2] - p;
        let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
        let det = a.dot(b.cross(c));
        let den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
        sum += 2.0 * math::atan2(det, den);
        if !on_boundary && near_triangle_box(t, p, tau) && point_triangle_distance(p, t) <= tau {
            on_boundary = true;
        }
    }
    Winding { value: sum / (4.0 * PI), on_boundary }
}

pub(crate) fn point_segment_distance(p: Vec2, s: &Segment2) -> f64 {
    let d = s.b - s.a;
    let len2 = d.dot(d);
    let t = ((p - s.a).dot(d) / len2).clamp(0.0, 1.0);
    (p - (s.a + d * t)).norm()
}

fn near_triangle_box(t: &Triangle3, p: Vec3, tau: f64) -> bool {
    let lo = t.v[0].min(t.v[1]).min(t.v[2]);
    let hi = t.v[0].max(t.v[1]).max(t.v[2]);
    p.x >= lo.x - tau
        && p.x <= hi.x + tau
        && p.y >= lo.y - tau
        && p.y <= hi.y + tau
        && p.z >= lo.z - tau
        && p.z <= hi.z + tau
}

/// Closest-point distance by Voronoi-region classification.
pub(crate) fn point_triangle_distance(p: Vec3, t: &Triangle3) -> f64 {
    let [a, b, c] = t.v;
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return ap.norm();
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return bp.norm();
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (p - (a + ab * v)).norm();
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return cp.norm();
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (p - (a + ac * w)).norm();
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (p - (b + (c - b) * w)).norm();
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (p - (a + ab * v + ac * w)).norm()
}

/// Closed polygon from a vertex loop, as a segment list.
pub fn polygon_segments(points: &[Vec2]) -> Vec<Segment2> {
    let n = points.len();
    (0..n).map(|i| Segment2::new(points[i], points[(i + 1) % n])).collect()
}

/// Axis-aligned box as twelve outward-facing triangles.
pub fn box_triangles(lo: Vec3, hi: Vec3) -> Vec<Triangle3> {
    let c = |i: usize| {
        Vec3::new(
            if i & 1 == 0 { lo.x } else { hi.x },
            if i & 2 == 0 { lo.y } else { hi.y },
            if i & 4 == 0 { lo.z } else { hi.z },
        )
    };
    // Quads listed counter-clockwise seen from outside.
    const QUADS: [[usize; 4]; 6] = [[0, 2, 3, 1], [4, 5, 7, 6], [0, 1, 5, 4], [2, 6, 7, 3], [0, 4, 6, 2], [1, 3, 7, 5]];
    let mut out = Vec::with_capacity(12);
    for q in QUADS {
        out.push(Triangle3::new(c(q[0]), c(q[1]), c(q[2])));
        out.push(Triangle3::new(c(q[0]), c(q[2]), c(q[3])));
    }
    out
}
