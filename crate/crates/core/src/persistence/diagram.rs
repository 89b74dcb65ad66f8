use alloc::vec::Vec;

use crate::grid::Dim;

/// A birth-death pair. Values are stored as volume fractions; the
/// filtration value is `1 - vf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PersistencePair {
    pub dim: usize,
    pub birth_vf: f64,
    /// `None` for essential classes.
    pub death_vf: Option<f64>,
}

impl PersistencePair {
    pub fn birth(&self) -> f64 {
        1.0 - self.birth_vf
    }

    /// Death value, `f64::INFINITY` for essential classes.
    pub fn death(&self) -> f64 {
        self.death_vf.map_or(f64::INFINITY, |d| 1.0 - d)
    }

    pub fn persistence(&self) -> f64 {
        self.death() - self.birth()
    }

    pub fn is_essential(&self) -> bool {
        self.death_vf.is_none()
    }

    pub fn is_zero_persistence(&self) -> bool {
        self.death_vf == Some(self.birth_vf)
    }

    /// Alive in the sublevel set `vf >= t`.
    pub fn alive_at(&self, t: f64) -> bool {
        self.birth_vf >= t && self.death_vf.is_none_or(|d| d < t)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PersistenceDiagram {
    dim: Dim,
    pairs: Vec<PersistencePair>,
}

impl PersistenceDiagram {
    /// Pairs are sorted by dimension, birth, then death.
    pub fn new(dim: Dim, mut pairs: Vec<PersistencePair>) -> Self {
        pairs.sort_by(|a, b| {
            a.dim.cmp(&b.dim).then(a.birth().total_cmp(&b.birth())).then(a.death().total_cmp(&b.death()))
        });
        Self { dim, pairs }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn pairs(&self) -> &[PersistencePair] {
        &self.pairs
    }

    /// Pairs with positive persistence.
    pub fn nonzero_pairs(&self) -> impl Iterator<Item = &PersistencePair> {
        self.pairs.iter().filter(|p| !p.is_zero_persistence())
    }

    /// Betti numbers of the material at volume-fraction threshold `t`.
    pub fn betti_at(&self, t: f64) -> [usize; 3] {
        let mut b = [0; 3];
        for p in &self.pairs {
            if p.dim < 3 && p.alive_at(t) {
                b[p.dim] += 1;
            }
        }
        b
    }

    /// Distinct volume fractions where some Betti number can change,
    /// in descending order.
    pub fn critical_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> =
            self.nonzero_pairs().flat_map(|p| core::iter::once(p.birth_vf).chain(p.death_vf)).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v.dedup();
        v
    }

    pub fn betti_curve(&self) -> BettiCurve {
        let points = self.critical_values().into_iter().map(|t| (t, self.betti_at(t))).collect();
        BettiCurve { dim: self.dim, points }
    }
}

/// Betti numbers sampled at every critical volume fraction. Between two
/// consecutive critical values `a > b`, the numbers on `(b, a]` equal those
/// at `a`; above the largest value all are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BettiCurve {
    pub dim: Dim,
    pub points: Vec<(f64, [usize; 3])>,
}

impl BettiCurve {
    pub fn at(&self, t: f64) -> [usize; 3] {
        self.points.iter().rev().find(|(v, _)| *v >= t).map_or([0; 3], |(_, b)| *b)
    }
}
