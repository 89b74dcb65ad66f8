mod oracles;

use std::f64::consts::{PI, SQRT_2};

use proptest::prelude::*;
use vfmesh_core::theory::{
    area_a1, area_a2, gap_sample, nonconvergence_case, sweep_gap, wedge_case, FractionSource, GapClass, SweepConfig,
};
use vfmesh_core::Vec2;

/// The rotated cell, centred at the origin, built independently of the
/// library: vertices at `theta + k pi/2`, distance `ell / sqrt 2`.
fn cell(theta: f64, ell: f64) -> Vec<Vec2> {
    let r = ell / SQRT_2;
    (0..4)
        .map(|k| {
            let a = theta + k as f64 * PI / 2.0;
            Vec2::new(r * a.cos(), r * a.sin())
        })
        .collect()
}

/// Area of the cell inside the half-space `x <= -L/2`.
fn oracle(theta: f64, l: f64, ell: f64) -> f64 {
    oracles::clipped_area(&cell(theta, ell), Vec2::new(1.0, 0.0), -l / 2.0)
}

fn in_a1_regime(theta: f64, l: f64, ell: f64) -> bool {
    l / 2.0 <= -(ell / SQRT_2) * theta.cos()
}

#[test]
fn a1_anchor_values() {
    assert!((area_a1(1.25 * PI, 0.0, 1.0).unwrap() - 0.5).abs() < 1e-12);
    for l in [0.2, 0.4] {
        let a = area_a1(1.25 * PI, l, 1.0).unwrap();
        assert!((a - (1.0 - l) / 2.0).abs() < 1e-12);
        assert!((a - oracle(1.25 * PI, l, 1.0)).abs() < 1e-12);
    }
}

#[test]
fn a2_quarter_cell_at_the_lower_bound() {
    let a = area_a2(1.5 * PI, SQRT_2 - 1.0, 1.0).unwrap();
    assert!((a - 0.25).abs() < 1e-12);
    assert!((oracle(1.5 * PI, SQRT_2 - 1.0, 1.0) - 0.25).abs() < 1e-12);
}

#[test]
fn a1_meets_a2_at_the_crossover() {
    let r = SQRT_2 / 2.0;
    let l = 2.0 * (2.0 - SQRT_2) * r;
    let a1 = area_a1(1.25 * PI, l, 1.0).unwrap();
    let a2 = area_a2(1.5 * PI, l, 1.0).unwrap();
    let expected = ((2.0 - SQRT_2) / 2.0).powi(2);
    assert!((a1 - a2).abs() < 1e-10);
    assert!((a1 - expected).abs() < 1e-10);
    assert!((expected - 0.08579).abs() < 1e-5);
}

#[test]
fn regimes_join_continuously() {
    for k in 1..20 {
        let theta = 1.25 * PI + 0.25 * PI * k as f64 / 20.0;
        // Gap width at which the cut changes from parallelogram to triangle.
        let l = -2.0 * (SQRT_2 / 2.0) * theta.cos();
        let a1 = area_a1(theta, l, 1.0).unwrap();
        let a2 = area_a2(theta, l, 1.0).unwrap();
        assert!((a1 - a2).abs() < 1e-10, "theta {theta}");
    }
}

#[test]
fn closed_forms_match_clipping_on_a_lattice() {
    for ell in [1.0, 0.37] {
        for i in 0..50 {
            let theta = 1.25 * PI + 0.25 * PI * (i as f64 + 0.5) / 50.0;
            for j in 0..50 {
                let l = 1.5 * ell * j as f64 / 49.0;
                let truth = oracle(theta, l, ell);
                let got = if in_a1_regime(theta, l, ell) {
                    area_a1(theta, l, ell).unwrap()
                } else {
                    area_a2(theta, l, ell).unwrap()
                };
                assert!((got - truth).abs() <= 1e-10, "theta {theta} L {l}: {got} vs {truth}");
            }
        }
    }
}

#[test]
fn domains_and_regimes_are_enforced() {
    assert!(area_a1(1.0, 0.1, 1.0).is_err());
    assert!(area_a1(1.5 * PI, 0.1, 1.0).is_err());
    assert!(area_a2(1.25 * PI, 0.1, 1.0).is_err());
    // Wide gap at 5pi/4 is past the parallelogram regime.
    assert!(area_a1(1.25 * PI + 0.1, 1.4, 1.0).is_err());
    assert!(area_a2(1.25 * PI + 0.01, 0.0, 1.0).is_err());
    assert!(area_a1(1.3 * PI, -0.1, 1.0).is_err());
}

fn a2(theta: f64, l: f64) -> f64 {
    area_a2(theta, l, 1.0).unwrap()
}

#[test]
fn a2_critical_points() {
    let h = 1e-6;
    let r = SQRT_2 / 2.0;
    let end = 1.5 * PI;
    // The cell is mirror-symmetric about the end of the domain, so the
    // right neighbour equals the left one; check that against clipping.
    for l in [0.45, 0.6, 0.7, 0.75, 0.9] {
        assert!((oracle(end + h, l, 1.0) - a2(end - h, l)).abs() < 1e-12);
        let d = (oracle(end + h, l, 1.0) - a2(end - h, l)) / (2.0 * h);
        assert!(d.abs() < 1e-6);
    }
    // Minimum at the end for L <= r, maximum past it.
    for l in [0.45, 0.6, 0.7] {
        assert!(a2(end - 1e-3, l) > a2(end, l), "L {l}");
    }
    for l in [0.75, 0.8, 0.9] {
        assert!(a2(end - 1e-3, l) < a2(end, l), "L {l}");
    }
    // Interior minimum where sin(theta) = -r / L.
    for l in [0.75, 0.8, 0.85, 0.9] {
        let theta = PI + (r / l).asin();
        assert!(theta > 1.25 * PI && theta < end);
        assert!(!in_a1_regime(theta, l, 1.0));
        let d = (a2(theta + h, l) - a2(theta - h, l)) / (2.0 * h);
        assert!(d.abs() < 1e-6, "L {l}: {d}");
        assert!(a2(theta + 1e-3, l) > a2(theta, l) && a2(theta - 1e-3, l) > a2(theta, l));
    }
}

#[test]
fn refinement_never_settles() {
    for (corner, first) in [(2.0 / 3.0, 1), (1.0 / 3.0, 2)] {
        let levels = nonconvergence_case(corner, 6, 32).unwrap();
        let b0: Vec<usize> = levels.iter().map(|l| l.b0).collect();
        let expected: Vec<usize> = (0..6).map(|k| if k % 2 == 0 { first } else { 3 - first }).collect();
        assert_eq!(b0, expected, "corner {corner}");
        for l in &levels {
            let target = if l.b0 == 1 { 10.0 / 18.0 } else { 7.0 / 18.0 };
            assert!((l.corner_vf - target).abs() <= 0.02, "level {}: {}", l.level, l.corner_vf);
        }
    }
    assert!(nonconvergence_case(2.0 / 3.0, 1, 8).is_err());
}

#[test]
fn narrow_wedge_islands_sit_in_the_band() {
    let rep = wedge_case(5f64.to_radians(), 1.0, 8, 3).unwrap();
    let cot = 1.0 / 5f64.to_radians().tan();
    assert!((rep.band.0 - cot / 2.0).abs() < 1e-12 && (rep.band.1 - cot).abs() < 1e-12);
    assert!(!rep.islands.is_empty());
    assert!(rep.islands_in_band);
    for i in &rep.islands {
        assert!(i.min_distance >= rep.band.0 - 2.0 && i.max_distance <= rep.band.1 + 2.0);
    }
    assert!(rep.components_pre > 1);
    assert_eq!(rep.components_post, 1);
    assert_eq!(rep.repair.residual_pinches, 0);
}

#[test]
fn wide_wedge_has_no_islands() {
    let rep = wedge_case(45f64.to_radians(), 1.0, 8, 3).unwrap();
    assert!(rep.islands.is_empty());
    assert_eq!(rep.components_post, 1);
    assert!(wedge_case(0.0, 1.0, 8, 3).is_err());
    assert!(wedge_case(PI / 2.0, 1.0, 8, 3).is_err());
}

fn single_gap(l: f64, theta_count: usize, offsets: usize) -> SweepConfig {
    SweepConfig { l_min: l, l_max: l, l_count: 1, theta_count, offsets_per_axis: offsets, ..SweepConfig::default() }
}

#[test]
fn narrow_gaps_always_close() {
    let rep = sweep_gap(&single_gap(0.3, 16, 4)).unwrap();
    assert_eq!(rep.rows[0].plain, GapClass::AlwaysClosed);
    assert_eq!(rep.rows[0].antialiased, GapClass::AlwaysClosed);
}

#[test]
fn gaps_wider_than_a_cell_always_open() {
    let cfg = single_gap(1.05, 1, 4);
    for o in cfg.offset_values() {
        let [plain, aa] = gap_sample(&cfg, 1.05, 1.25 * PI, o).unwrap();
        assert!(!plain.closed && !aa.closed);
    }
    let rep = sweep_gap(&single_gap(1.05, 16, 4)).unwrap();
    assert_eq!(rep.rows[0].plain, GapClass::AlwaysOpen);
}

#[test]
fn middle_gaps_depend_on_the_grid() {
    let rep = sweep_gap(&single_gap(0.6, 16, 4)).unwrap();
    assert_eq!(rep.rows[0].plain, GapClass::Ambiguous);
    let rep = sweep_gap(&single_gap(0.75, 16, 4)).unwrap();
    assert_eq!(rep.rows[0].antialiased, GapClass::AlwaysOpen);
}

#[test]
fn sampled_and_exact_fractions_agree_on_easy_gaps() {
    for l in [0.2, 1.2] {
        let mut cfg = single_gap(l, 4, 2);
        cfg.source = FractionSource::Sampled { s: 8 };
        let sampled = sweep_gap(&cfg).unwrap();
        cfg.source = FractionSource::Exact;
        let exact = sweep_gap(&cfg).unwrap();
        assert_eq!(sampled.rows[0].plain, exact.rows[0].plain);
        assert_eq!(sampled.rows[0].antialiased, exact.rows[0].antialiased);
    }
}

#[test]
fn sweep_configuration_is_validated() {
    let bad = SweepConfig { ell: 0.0, ..SweepConfig::default() };
    assert!(sweep_gap(&bad).is_err());
    let bad = SweepConfig { source: FractionSource::Sampled { s: 3 }, ..SweepConfig::default() };
    assert!(sweep_gap(&bad).is_err());
    let cfg = SweepConfig::default();
    assert_eq!(cfg.gap_values().len(), 128);
    assert!((cfg.step() - 1.5 / 127.0).abs() < 1e-15);
}

proptest! {
    #[test]
    fn closed_forms_match_clipping_anywhere(u in 0.0001..1.0f64, l in 0.0..2.0f64, ell in 0.1..3.0f64) {
        let theta = 1.25 * PI + 0.25 * PI * u;
        let l = l * ell;
        let truth = oracle(theta, l, ell);
        let got = if in_a1_regime(theta, l, ell) { area_a1(theta, l, ell) } else { area_a2(theta, l, ell) };
        let got = got.unwrap();
        prop_assert!((got - truth).abs() <= 1e-10 * ell * ell);
    }
}
