use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vfmesh_core::mesher::{
    apply_pinch_templates_2d, classify_pinch, classify_pinches, detect_pinches, extract_mesh, join_archipelago,
    mesh_field, pinch_case, remove_islands, residual_pinches, resolve_adjacent_conflicts, ConflictPolicy, CubicalMesh,
    PinchKind, Provenance, RepairOptions, Resolution, REFINE,
};
use vfmesh_core::persistence::compute_persistence;
use vfmesh_core::theory::{gap_grid, gap_soup};
use vfmesh_core::{compute_field, Dim, Grid, Mat3, Site, Vec3, VolumeFractionField};

const T: f64 = 0.5;

fn grid(dim: Dim, extents: [usize; 3]) -> Grid {
    Grid::new(dim, 1.0, Vec3::ZERO, Mat3::IDENTITY, extents).unwrap()
}

/// 2D field from an ASCII picture (top row first, `#` = 1, `.` = 0) with
/// every subcell at `sub(site)`.
fn picture(rows: &[&str], sub: impl Fn(Site) -> f64) -> VolumeFractionField {
    let ny = rows.len();
    let nx = rows[0].len();
    let g = grid(Dim::Two, [nx, ny, 1]);
    VolumeFractionField::from_site_fn(&g, 2, |s| match s.as_cell(Dim::Two) {
        Some([i, j, _]) => f64::from(u8::from(rows[ny - 1 - j].as_bytes()[i] == b'#')),
        None => sub(s),
    })
}

/// Occupied fine squares of a 2D mesh.
fn fine_cells(mesh: &CubicalMesh) -> BTreeSet<(usize, usize)> {
    let fe = mesh.fine_extents();
    let mut out = BTreeSet::new();
    for j in 0..fe[1] {
        for i in 0..fe[0] {
            if mesh.fine_occupied([i, j, 0]) {
                out.insert((i, j));
            }
        }
    }
    out
}

/// Components (edge adjacency) and Euler characteristic of the closed
/// union of fine squares, computed from scratch.
fn topology(cells: &BTreeSet<(usize, usize)>) -> (usize, i64) {
    let mut seen = BTreeSet::new();
    let mut comps = 0;
    for &c in cells {
        if !seen.insert(c) {
            continue;
        }
        comps += 1;
        let mut stack = vec![c];
        while let Some((i, j)) = stack.pop() {
            let mut nb = vec![(i + 1, j), (i, j + 1)];
            if i > 0 {
                nb.push((i - 1, j));
            }
            if j > 0 {
                nb.push((i, j - 1));
            }
            for n in nb {
                if cells.contains(&n) && seen.insert(n) {
                    stack.push(n);
                }
            }
        }
    }
    let mut verts = BTreeSet::new();
    let mut edges = BTreeSet::new();
    for &(i, j) in cells {
        for (a, b) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            verts.insert((i + a, j + b));
        }
        edges.insert((i, j, 0));
        edges.insert((i, j + 1, 0));
        edges.insert((i, j, 1));
        edges.insert((i + 1, j, 1));
    }
    (comps, verts.len() as i64 - edges.len() as i64 + cells.len() as i64)
}

#[test]
fn extraction_thresholds() {
    let f = picture(&["###", "###"], |_| 1.0);
    let m = extract_mesh(&f, T).unwrap();
    assert_eq!((m.retained_count(), m.component_count()), (6, 1));
    let m = extract_mesh(&f, 1.1).unwrap();
    assert_eq!((m.retained_count(), m.component_count()), (0, 0));
    assert!(extract_mesh(&f, f64::NAN).is_err());
}

#[test]
fn retained_sets_shrink_as_the_threshold_rises() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g = grid(Dim::Two, [9, 7, 1]);
    let f = VolumeFractionField::from_site_fn(&g, 2, |_| rng.gen_range(0.0..1.0));
    let mut prev: Option<Vec<bool>> = None;
    for k in 0..=20 {
        let m = extract_mesh(&f, f64::from(k) / 20.0).unwrap();
        if let Some(p) = prev {
            assert!(m.retained().iter().zip(&p).all(|(now, before)| !now || *before));
        }
        prev = Some(m.retained().to_vec());
    }
}

#[test]
fn slanted_gap_aliases_into_pinches() {
    let g = gap_grid(1.0, 8, 1.5 * std::f64::consts::PI, [0.0, 0.0]).unwrap();
    let f = compute_field(&gap_soup(1.0, 0.55).unwrap(), &g, 4).unwrap();
    let m = extract_mesh(&f, T).unwrap();
    assert!(!detect_pinches(&m).is_empty());
    assert!(m.component_count() >= 2);
}

#[test]
fn diagonal_pair_is_one_vertex_pinch() {
    let f = picture(&[".#", "#."], |_| 0.0);
    let m = extract_mesh(&f, T).unwrap();
    let p = detect_pinches(&m);
    assert_eq!(p.len(), 1);
    assert_eq!(p[0].kind, PinchKind::Vertex);
    assert_eq!(p[0].site, Site::vertex_2d(1, 1));
    assert_eq!(p[0].retained, vec![true, false, false, true]);
    let full = extract_mesh(&picture(&["##", "##"], |_| 0.0), T).unwrap();
    assert!(detect_pinches(&full).is_empty());
}

fn hexes(extents: [usize; 3], on: &[[usize; 3]]) -> CubicalMesh {
    let g = grid(Dim::Three, extents);
    let occ = (0..g.cell_count()).map(|i| on.contains(&g.cell_coords(i))).collect();
    CubicalMesh::from_occupancy(&g, T, occ).unwrap()
}

#[test]
fn hexes_sharing_an_edge_pinch_once() {
    let m = hexes([2, 2, 1], &[[0, 0, 0], [1, 1, 0]]);
    let p = detect_pinches(&m);
    assert_eq!(p.len(), 1);
    assert_eq!(p[0].kind, PinchKind::Edge { axis: 2 });
    assert_eq!(p[0].site, Site::edge([1, 1, 0], 2));
    // In a 2x2x2 block the same pair is two stacked half-edges: one edge
    // pinch per grid edge, plus the vertex case.
    let m = hexes([2, 2, 2], &[[0, 0, 0], [1, 1, 0]]);
    let p = detect_pinches(&m);
    assert_eq!(p.iter().filter(|p| matches!(p.kind, PinchKind::Edge { .. })).count(), 1);
    assert!(p.iter().all(|p| p.case_id >= 1 && p.case_id <= 11));
    let full =
        hexes([2, 2, 2], &[[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0], [0, 0, 1], [1, 0, 1], [0, 1, 1], [1, 1, 1]]);
    assert!(detect_pinches(&full).is_empty());
}

#[test]
fn body_diagonal_is_a_vertex_pinch() {
    let m = hexes([2, 2, 2], &[[0, 0, 0], [1, 1, 1]]);
    let p = detect_pinches(&m);
    assert_eq!(p.len(), 1);
    assert_eq!(p[0].kind, PinchKind::Vertex);
    assert_eq!(p[0].case_id, pinch_case(0b1000_0001).unwrap());
}

#[test]
fn every_occupancy_of_a_block_has_a_consistent_case() {
    for mask in 0..=255u8 {
        let on: Vec<[usize; 3]> =
            (0..8).filter(|b| mask & (1 << b) != 0).map(|b| [b & 1, (b >> 1) & 1, (b >> 2) & 1]).collect();
        let p = detect_pinches(&hexes([2, 2, 2], &on));
        assert_eq!(p.is_empty(), pinch_case(mask).is_none(), "mask {mask:08b}");
        // Classes are taken up to rotation and reflection; pinching is
        // also blind to swapping material and void.
        assert_eq!(pinch_case(mask).is_some(), pinch_case(!mask).is_some());
        let mirrored = (0..8).fold(0u8, |m, b| if mask & (1 << b) != 0 { m | 1 << (b ^ 1) } else { m });
        assert_eq!(pinch_case(mask), pinch_case(mirrored));
    }
}

#[test]
fn classification_uses_greater_or_equal() {
    for (v, expected) in [(0.9, Resolution::Connect), (0.1, Resolution::Separate), (T, Resolution::Connect)] {
        let f = picture(&[".#", "#."], |_| v);
        let p = detect_pinches(&extract_mesh(&f, T).unwrap());
        assert_eq!(classify_pinch(&p[0], &f, T), expected);
    }
}

/// Pinches at x = 1 and x = 2 share cell (1,1); the one at x = 5 stands
/// apart behind a pinch-free column.
fn chains(values: [f64; 3]) -> (VolumeFractionField, Vec<vfmesh_core::mesher::Pinch>) {
    let f = picture(&[".#...#", "#.#.#."], |s| match s.0 {
        [2, 2, 0] => values[0],
        [4, 2, 0] => values[1],
        [10, 2, 0] => values[2],
        _ => 0.0,
    });
    let m = extract_mesh(&f, T).unwrap();
    let mut p = detect_pinches(&m);
    classify_pinches(&mut p, &f, T);
    (f, p)
}

fn resolutions(p: &[vfmesh_core::mesher::Pinch]) -> Vec<Resolution> {
    p.iter().map(|p| p.resolution.unwrap()).collect()
}

#[test]
fn agreeing_chain_is_unchanged() {
    let (_, mut p) = chains([0.9, 0.9, 0.1]);
    let sites: Vec<Site> = p.iter().map(|p| p.site).collect();
    assert_eq!(sites, vec![Site::vertex_2d(1, 1), Site::vertex_2d(2, 1), Site::vertex_2d(5, 1)]);
    let rep = resolve_adjacent_conflicts(&mut p, ConflictPolicy::Separate);
    assert_eq!((rep.chains, rep.conflicting_chains, rep.changed), (2, 0, 0));
    assert_eq!(resolutions(&p), vec![Resolution::Connect, Resolution::Connect, Resolution::Separate]);
}

#[test]
fn mixed_chain_follows_the_policy() {
    use Resolution::{Connect as C, Separate as S};
    let cases = [
        (ConflictPolicy::Separate, vec![S, S, C]),
        (ConflictPolicy::Connect, vec![C, C, C]),
        // One vote each: ties separate.
        (ConflictPolicy::Majority, vec![S, S, C]),
    ];
    for (policy, expected) in cases {
        let (_, mut p) = chains([0.9, 0.1, 0.9]);
        let rep = resolve_adjacent_conflicts(&mut p, policy);
        assert_eq!(rep.conflicting_chains, 1);
        assert_eq!(resolutions(&p), expected, "{policy:?}");
    }
}

#[test]
fn diagonal_pair_separated() {
    let f = picture(&[".#", "#."], |_| 0.1);
    let (m, rep) = mesh_field(&f, T, &RepairOptions::default()).unwrap();
    assert_eq!(rep.pinches[0].resolution, Some(Resolution::Separate));
    let cells = fine_cells(&m);
    let (comps, chi) = topology(&cells);
    assert_eq!((comps, chi), (2, 2));
    assert_eq!(m.component_count(), 2);
    // Each parent loses its corner child.
    let elems = m.elements();
    assert_eq!(elems.len(), 2 * (REFINE * REFINE - 1));
    assert!(elems.iter().all(|e| e.provenance == Provenance::PinchTemplate));
    let child = 1.0 / (REFINE * REFINE) as f64;
    let area: f64 = elems.iter().map(|e| (e.size * e.size) as f64 * child).sum();
    assert!((area - (2.0 - 2.0 * child)).abs() < 1e-12);
    assert!(residual_pinches(&m).is_empty());
}

#[test]
fn diagonal_pair_connected() {
    let f = picture(&[".#", "#."], |_| 0.9);
    let (m, _) = mesh_field(&f, T, &RepairOptions::default()).unwrap();
    let (comps, chi) = topology(&fine_cells(&m));
    // One simply connected piece: B1 = B0 - chi = 0.
    assert_eq!((comps, chi), (1, 1));
    assert_eq!(m.component_count(), 1);
    assert!(residual_pinches(&m).is_empty());
}

#[test]
fn chains_resolved_both_ways() {
    let (f, mut p) = chains([0.9, 0.9, 0.1]);
    resolve_adjacent_conflicts(&mut p, ConflictPolicy::Separate);
    let m = extract_mesh(&f, T).unwrap();
    assert_eq!(m.component_count(), 5);
    let r = apply_pinch_templates_2d(&m, &p).unwrap();
    // Left chain joins three cells, right pinch stays split.
    assert_eq!(r.component_count(), 3);
    assert!(residual_pinches(&r).is_empty());
    assert!(r.elements().iter().any(|e| e.provenance == Provenance::PinchTemplate));
}

#[test]
fn templates_need_resolutions() {
    let f = picture(&[".#", "#."], |_| 0.9);
    let m = extract_mesh(&f, T).unwrap();
    let p = detect_pinches(&m);
    assert!(apply_pinch_templates_2d(&m, &p).is_err());
}

#[test]
fn children_tile_their_parent() {
    let f = picture(&[".#.", "#.#", ".#."], |s| if s.0 == [2, 2, 0] { 0.9 } else { 0.1 });
    let (m, _) = mesh_field(&f, T, &RepairOptions { join: false, ..RepairOptions::default() }).unwrap();
    let g = m.grid().clone();
    let elems = m.elements();
    let parents: BTreeSet<usize> = elems.iter().filter(|e| e.size == 1).map(|e| e.parent).collect();
    assert!(!parents.is_empty());
    let corner = |f: [usize; 3]| {
        let h = |v: usize| 2.0 * v as f64 / REFINE as f64;
        g.to_world(g.lattice_local([h(f[0]), h(f[1]), 0.0]))
    };
    let square_area = |lo: [usize; 3], size: usize| {
        let p = [lo, [lo[0] + size, lo[1], 0], [lo[0] + size, lo[1] + size, 0], [lo[0], lo[1] + size, 0]].map(corner);
        (0..4).map(|i| p[i].x * p[(i + 1) % 4].y - p[(i + 1) % 4].x * p[i].y).sum::<f64>() / 2.0
    };
    for &parent in &parents {
        let c = g.cell_coords(parent);
        // All child slots of the template tile the parent exactly.
        let mut total = 0.0;
        for cj in 0..REFINE {
            for ci in 0..REFINE {
                total += square_area([c[0] * REFINE + ci, c[1] * REFINE + cj, 0], 1);
            }
        }
        assert!((total - square_area([c[0] * REFINE, c[1] * REFINE, 0], REFINE)).abs() < 1e-12);
        assert!((total - 1.0).abs() < 1e-12);
        // Kept children are interior-disjoint: each sample point of the
        // parent lies in at most one of them.
        let kids: Vec<_> = elems.iter().filter(|e| e.parent == parent).collect();
        for sj in 0..30 {
            for si in 0..30 {
                let x = (c[0] * REFINE) as f64 + (si as f64 + 0.5) * REFINE as f64 / 30.0;
                let y = (c[1] * REFINE) as f64 + (sj as f64 + 0.5) * REFINE as f64 / 30.0;
                let hits = kids
                    .iter()
                    .filter(|e| {
                        let (lx, ly) = (e.lo[0] as f64, e.lo[1] as f64);
                        x > lx && x < lx + e.size as f64 && y > ly && y < ly + e.size as f64
                    })
                    .count();
                assert!(hits <= 1);
            }
        }
    }
}

#[test]
fn hanging_nodes_are_flagged_next_to_templates() {
    let f = picture(&[".##", "#.."], |_| 0.1);
    let (m, _) = mesh_field(&f, T, &RepairOptions { join: false, ..RepairOptions::default() }).unwrap();
    let elems = m.elements();
    assert!(elems.iter().any(|e| e.size == REFINE && e.hanging));
}

#[test]
fn join_bridges_a_gap_through_interior_edges() {
    // Cells 0 and 2 retained; the gap cell's edges from left to right are
    // the bottom and top edges of cell 1.
    let bridge = |inside: bool| {
        picture(&["#.#"], move |s| match s.0 {
            [3, 0, 0] | [3, 2, 0] => {
                if inside {
                    0.9
                } else {
                    0.1
                }
            }
            [x, _, 0] if x % 2 == 0 => 0.9,
            _ => 0.1,
        })
    };
    let f = bridge(true);
    let m = extract_mesh(&f, T).unwrap();
    assert_eq!(m.component_count(), 2);
    let (joined, rep) = join_archipelago(&m, &f, T);
    assert_eq!(joined.component_count(), 1);
    assert_eq!(rep.bridges, 1);
    assert!(joined.elements().iter().any(|e| e.provenance == Provenance::BridgeTemplate));
    assert!(residual_pinches(&joined).is_empty());

    let f = bridge(false);
    let (joined, rep) = join_archipelago(&extract_mesh(&f, T).unwrap(), &f, T);
    assert_eq!((joined.component_count(), rep.bridges), (2, 0));
}

#[test]
fn island_removal() {
    let rows = [
        "########..",
        "########..",
        "########..",
        "########.#",
        "########.#",
        "########..",
        "########..",
        "########..",
    ];
    let f = picture(&rows, |_| 0.0);
    let m = extract_mesh(&f, T).unwrap();
    assert_eq!(m.components().sizes_desc(), vec![64, 2]);
    let (r, removed) = remove_islands(&m, 3);
    assert_eq!((r.components().sizes_desc(), removed), (vec![64], 1));
    let (r, removed) = remove_islands(&m, 1);
    assert_eq!((r.components().sizes_desc(), removed), (vec![64, 2], 0));
    let opts = RepairOptions { antialias: false, min_cells: 0, ..RepairOptions::default() };
    let (r, rep) = mesh_field(&f, T, &opts).unwrap();
    assert_eq!(r.components().sizes_desc(), vec![64, 2]);
    assert!(!rep.warnings.is_empty());
}

#[test]
fn three_dimensional_pinches_are_reported_not_repaired() {
    let g = grid(Dim::Three, [2, 2, 2]);
    let f = VolumeFractionField::from_site_fn(&g, 2, |s| match s.as_cell(Dim::Three) {
        Some([0, 0, 0]) | Some([1, 1, 1]) => 1.0,
        Some(_) => 0.0,
        None => 0.9,
    });
    let (m, rep) = mesh_field(&f, T, &RepairOptions { join: false, ..RepairOptions::default() }).unwrap();
    assert_eq!(rep.pinches.len(), 1);
    assert_eq!(rep.pinches[0].resolution, Some(Resolution::Connect));
    assert!(!rep.warnings.is_empty());
    assert_eq!(m.retained_count(), 2);
    let full = VolumeFractionField::from_site_fn(&g, 2, |_| 1.0);
    let m = extract_mesh(&full, T).unwrap();
    assert_eq!(m.elements().len(), 8);
    assert_eq!(m.component_count(), 1);
}

/// Random 0/1 cells with random subcell values.
fn random_pattern(rng: &mut impl Rng, n: usize, density: f64) -> VolumeFractionField {
    let g = grid(Dim::Two, [n, n, 1]);
    VolumeFractionField::from_site_fn(&g, 2, |s| match s.as_cell(Dim::Two) {
        Some(_) => f64::from(u8::from(rng.gen_bool(density))),
        None => rng.gen_range(0.0..1.0),
    })
}

#[test]
fn repaired_meshes_have_no_pinches() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for trial in 0..300 {
        let f = random_pattern(&mut rng, 12, 0.3 + 0.4 * (trial % 3) as f64 / 2.0);
        for policy in [ConflictPolicy::Separate, ConflictPolicy::Connect, ConflictPolicy::Majority] {
            for join in [false, true] {
                let (m, rep) = mesh_field(&f, T, &RepairOptions { policy, join, ..RepairOptions::default() }).unwrap();
                assert!(residual_pinches(&m).is_empty(), "trial {trial} {policy:?} join {join}");
                assert_eq!(rep.residual_pinches, 0);
                let (comps, _) = topology(&fine_cells(&m));
                assert_eq!(comps, m.component_count());
            }
        }
    }
}

#[test]
fn component_counts_agree_with_persistence() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut agreeing = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=6);
        let f = random_pattern(&mut rng, n, 0.5);
        let diagram = compute_persistence(&f);
        let b0 = diagram.betti_at(T)[0];
        // With every pinch vertex exterior the dual complex adds no
        // connections, so plain extraction already matches.
        let sep = VolumeFractionField::from_site_fn(f.grid(), 2, |s| match s.as_cell(Dim::Two) {
            Some(c) => f.cell_value(c),
            None => 0.0,
        });
        let plain = extract_mesh(&sep, T).unwrap();
        assert_eq!(plain.component_count(), compute_persistence(&sep).betti_at(T)[0]);
        // With the real subcell values, repaired meshes match whenever no
        // conflicting chain had to be overruled.
        let opts = RepairOptions { join: false, ..RepairOptions::default() };
        let (m, rep) = mesh_field(&f, T, &opts).unwrap();
        if rep.conflicts.changed == 0 {
            agreeing += 1;
            assert_eq!(m.component_count(), b0);
        }
    }
    assert!(agreeing > 150, "{agreeing}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn repair_is_sound_on_arbitrary_patterns(bits in proptest::collection::vec(any::<bool>(), 64), subs in proptest::collection::vec(0.0..1.0f64, 81)) {
        let g = grid(Dim::Two, [8, 8, 1]);
        let f = VolumeFractionField::from_site_fn(&g, 2, |s| match s.as_cell(Dim::Two) {
            Some(c) => f64::from(u8::from(bits[c[0] + 8 * c[1]])),
            None => subs[(s.0[0] / 2) + 9 * (s.0[1] / 2)],
        });
        let (m, _) = mesh_field(&f, T, &RepairOptions::default()).unwrap();
        prop_assert!(residual_pinches(&m).is_empty());
        // Without anti-aliasing the extracted cells come back untouched.
        let (plain, _) = mesh_field(&f, T, &RepairOptions { antialias: false, ..RepairOptions::default() }).unwrap();
        prop_assert!(!plain.is_refined());
        let extracted = extract_mesh(&f, T).unwrap();
        prop_assert_eq!(plain.retained(), extracted.retained());
    }
}
