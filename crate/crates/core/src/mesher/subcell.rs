use alloc::vec;
use alloc::vec::Vec;

use crate::field::VolumeFractionField;
use crate::grid::Site;
use crate::unionfind::UnionFind;

/// Components of the interior subcells (all sites with `vf >= t`), joined
/// by incidence: sites one step apart on the doubled lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteComponents {
    pub count: usize,
    labels: Vec<u32>,
}

impl SiteComponents {
    pub fn label(&self, field: &VolumeFractionField, s: Site) -> Option<usize> {
        match self.labels[field.grid().site_index(s)] {
            u32::MAX => None,
            l => Some(l as usize),
        }
    }
}

pub fn antialiased_components(field: &VolumeFractionField, t: f64) -> SiteComponents {
    site_components(field, t, 1, |_| true)
}

/// Face-adjacent components of the interior top cells only.
pub fn cell_components(field: &VolumeFractionField, t: f64) -> SiteComponents {
    let d = field.grid().dim();
    site_components(field, t, 2, move |s: Site| s.odd_count(d) == d.n())
}

fn site_components(field: &VolumeFractionField, t: f64, step: usize, keep: impl Fn(Site) -> bool) -> SiteComponents {
    let g = field.grid();
    let n = g.site_count();
    let e = g.site_extents();
    let d = g.dim().n();
    let inside: Vec<bool> = field.iter().map(|(s, v)| v >= t && keep(s)).collect();
    let mut uf = UnionFind::new(n);
    for (i, &ins) in inside.iter().enumerate() {
        if !ins {
            continue;
        }
        let s = g.site_at(i);
        for a in 0..d {
            if s.0[a] + step < e[a] {
                let mut q = s;
                q.0[a] += step;
                let j = g.site_index(q);
                if inside[j] {
                    uf.union(i, j);
                }
            }
        }
    }
    let mut labels = vec![u32::MAX; n];
    let mut root_label = vec![u32::MAX; n];
    let mut count = 0;
    for i in 0..n {
        if inside[i] {
            let r = uf.find(i);
            if root_label[r] == u32::MAX {
                root_label[r] = count;
                count += 1;
            }
            labels[i] = root_label[r];
        }
    }
    SiteComponents { count: count as usize, labels }
}
