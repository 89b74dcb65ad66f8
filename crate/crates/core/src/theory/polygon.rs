use alloc::vec::Vec;

use crate::geom::Vec2;

/// Keeps the part of a convex polygon where `n . p <= c`.
pub fn clip_half_plane(poly: &[Vec2], n: Vec2, c: f64) -> Vec<Vec2> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let len = poly.len();
    for i in 0..len {
        let p = poly[i];
        let q = poly[(i + 1) % len];
        let dp = n.dot(p) - c;
        let dq = n.dot(q) - c;
        if dp <= 0.0 {
            out.push(p);
        }
        if (dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0) {
            let t = dp / (dp - dq);
            out.push(p + (q - p) * t);
        }
    }
    out
}

/// Signed shoelace area, positive for counter-clockwise loops.
pub fn polygon_area(poly: &[Vec2]) -> f64 {
    let len = poly.len();
    (0..len).map(|i| poly[i].cross(poly[(i + 1) % len])).sum::<f64>() * 0.5
}
