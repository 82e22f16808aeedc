//! Acceptance gate: one test per release criterion, each printing a single
//! pass/fail line. Seeds, probes and tolerances are pinned so every run
//! checks the same numbers.

use pleat::balls::{decompose_ball, decompose_ball_with, BallOpts};
use pleat::geometry::{Metric, MultiPolygon, Point2, Polygon};
use pleat::horseshoe::{area_growth_fit, horseshoe_area_experiment};
use pleat::llc::{build_grid, complement_connected, llc_check, QuotientGrid};
use pleat::measure::{
    extension_constant, log_radii, regularity_scan, union_area, verify_area_bounds, BoundCase,
};
use pleat::quotient::{distance_matrix, quotient_distance, refine_until, QuotientOpts};
use pleat::scheme::{PairingScheme, SegmentPairing, SeqSpec, TypeWSpec};
use pleat::schemefile::{builtin, singular_class_count, PairingFile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Prints exactly one verdict line per criterion, also on panic.
struct Verdict {
    n: u32,
    name: &'static str,
    passed: bool,
}

impl Verdict {
    fn start(n: u32, name: &'static str) -> Verdict {
        Verdict {
            n,
            name,
            passed: false,
        }
    }

    fn pass(mut self) {
        self.passed = true;
    }
}

impl Drop for Verdict {
    fn drop(&mut self) {
        println!(
            "criterion {} ({}): {}",
            self.n,
            self.name,
            if self.passed { "pass" } else { "fail" }
        );
    }
}

fn scheme(name: &str) -> PairingScheme {
    builtin(name).unwrap().to_scheme().unwrap()
}

fn random_point_in(scheme: &PairingScheme, rng: &mut ChaCha8Rng) -> Point2 {
    loop {
        let poly = &scheme.domain.polygons[rng.gen_range(0..scheme.domain.polygons.len())];
        let (lo, hi) = poly.bbox();
        let p = Point2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
        if poly.boundary_distance(p) > 1e-3 && poly.contains(p) {
            return p;
        }
    }
}

#[test]
fn criterion_1_quotient_metric_exactness() {
    let v = Verdict::start(1, "quotient metric exactness");
    let start = std::time::Instant::now();
    let torus = scheme("torus");

    // Wrap-around distance across the glued side.
    let wrap = refine_until(
        &torus,
        Point2::new(0.1, 0.5),
        Point2::new(0.9, 0.5),
        Metric::Max,
        0.05,
        1e-5,
    )
    .unwrap();
    assert!(wrap.converged);
    assert!((wrap.value - 0.2).abs() < 1e-4, "wrap {}", wrap.value);

    // Identified boundary points are at distance exactly zero. Probes sit on
    // the sample lattice so the zero-cost identification edges apply.
    let opts = QuotientOpts::new(Metric::Max, 0.05);
    for k in [1, 7, 13, 19] {
        let t = 0.05 * k as f64;
        let d = quotient_distance(&torus, Point2::new(t, 0.0), Point2::new(t, 1.0), &opts)
            .unwrap()
            .value;
        assert_eq!(d, 0.0, "bottom-top pair at {t}");
        let d = quotient_distance(&torus, Point2::new(0.0, t), Point2::new(1.0, t), &opts)
            .unwrap()
            .value;
        assert_eq!(d, 0.0, "left-right pair at {t}");
    }

    // Triangle inequality over 10^3 random triples of 40 sample points.
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let pts: Vec<Point2> = (0..40).map(|_| random_point_in(&torus, &mut rng)).collect();
    let m = distance_matrix(&torus, &pts, &QuotientOpts::new(Metric::Max, 0.04)).unwrap();
    for _ in 0..1000 {
        let (i, j, k) = (
            rng.gen_range(0..40),
            rng.gen_range(0..40),
            rng.gen_range(0..40),
        );
        assert!(
            m[i][k] <= m[i][j] + m[j][k] + 1e-9,
            "triangle violation at ({i},{j},{k}): {} > {} + {}",
            m[i][k],
            m[i][j],
            m[j][k]
        );
    }
    assert!(start.elapsed().as_secs() < 10);
    v.pass();
}

/// Symmetric-difference area between the closed-form ball decomposition and
/// the grid-Dijkstra membership set, plus the decomposed ball area.
fn oracle_symdiff(
    scheme: &PairingScheme,
    grid: &QuotientGrid,
    center: Point2,
    r: f64,
) -> (f64, f64) {
    let opts = BallOpts {
        stair_tol_factor: 2e-4,
        ..Default::default()
    };
    let dec = decompose_ball_with(scheme, center, r, &opts).unwrap();
    let marked = grid.mark_ball(&dec);
    let dist = grid
        .max_metric_distances(scheme, center, r + 3.0 * grid.h)
        .unwrap();
    let mismatches = marked
        .iter()
        .zip(&dist)
        .filter(|&(&m, &d)| m != (d <= r + 1e-9))
        .count();
    let area = union_area(scheme, &dec.pieces).value;
    (mismatches as f64 * grid.h * grid.h, area)
}

#[test]
fn criterion_2_decomposition_matches_grid_oracle() {
    let v = Verdict::start(2, "ball decomposition matches grid oracle");
    let start = std::time::Instant::now();
    for name in ["example-1.3", "four-rectangle"] {
        let s = scheme(name);
        let mut rng = ChaCha8Rng::seed_from_u64(202);
        let mut coarse_total = 0.0;
        let mut fine_total = 0.0;
        for &r in &[0.3, 0.4] {
            let h = r / 100.0;
            let grid_h = build_grid(&s, h).unwrap();
            let grid_h2 = build_grid(&s, h / 2.0).unwrap();
            for _ in 0..10 {
                let c = random_point_in(&s, &mut rng);
                let (sd_h, area) = oracle_symdiff(&s, &grid_h, c, r);
                let (sd_h2, _) = oracle_symdiff(&s, &grid_h2, c, r);
                assert!(
                    sd_h < 0.01 * area,
                    "{name}: symmetric difference {sd_h} vs area {area} at r={r}, c=({}, {})",
                    c.x,
                    c.y
                );
                coarse_total += sd_h;
                fine_total += sd_h2;
            }
        }
        assert!(
            fine_total < coarse_total,
            "{name}: total symmetric difference did not shrink: {fine_total} vs {coarse_total}"
        );
    }
    assert!(start.elapsed().as_secs() < 120);
    v.pass();
}

#[test]
fn criterion_3_area_bounds_by_center_type() {
    let v = Verdict::start(3, "area bounds by center type");
    let start = std::time::Instant::now();
    let ex = scheme("example-1.3");

    // One accumulation center, all radii.
    let acc = Point2::new(0.0, 0.25);
    let samples: Vec<(Point2, f64)> = log_radii(0.002, 0.1, 12).iter().map(|&r| (acc, r)).collect();
    let t = verify_area_bounds(&ex, BoundCase::Accumulation { w: 0 }, &samples).unwrap();
    assert!((t.coeff - 5.5).abs() < 1e-12, "coeff {}", t.coeff);
    assert!(t.all_pass, "accumulation rows: {:#?}", t.rows);

    // Five junction centers down the alternating side.
    let junctions = [
        Point2::new(0.0, 0.625),
        Point2::new(0.0, 0.5625),
        Point2::new(0.0, 0.4375),
        Point2::new(0.0, 0.40625),
        Point2::new(0.0, 0.34375),
    ];
    let mut samples = vec![];
    for &c in &junctions {
        for &r in &log_radii(0.001, 0.02, 12) {
            samples.push((c, r));
        }
    }
    let t = verify_area_bounds(&ex, BoundCase::Conic { w: 0 }, &samples).unwrap();
    assert!((t.coeff - 14.0).abs() < 1e-12, "coeff {}", t.coeff);
    assert!(t.all_pass, "conic rows: {:#?}", t.rows);

    // 43 centers away from the alternating side: 4 glued planar points, the
    // fold crease, and 38 random interior points.
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut centers = vec![
        Point2::new(0.2, 0.0),
        Point2::new(0.4, 0.0),
        Point2::new(0.6, 0.0),
        Point2::new(0.8, 0.0),
        Point2::new(1.0, 0.5),
    ];
    while centers.len() < 43 {
        centers.push(Point2::new(rng.gen_range(0.1..0.9), rng.gen_range(0.1..0.9)));
    }
    let mut samples = vec![];
    for &c in &centers {
        for &r in &log_radii(0.002, 0.05, 12) {
            samples.push((c, r));
        }
    }
    let t = verify_area_bounds(&ex, BoundCase::Regular, &samples).unwrap();
    assert!(t.all_pass, "regular failures: {:#?}", t.rows.iter().filter(|r| !r.pass).collect::<Vec<_>>());

    // Finite alternating side with three folds per run: area <= 4 r^2 at its
    // end point.
    let finite = finite_w_scheme();
    let samples: Vec<(Point2, f64)> = log_radii(0.001, 0.02, 12)
        .iter()
        .map(|&r| (Point2::new(0.0, 0.25), r))
        .collect();
    let t = verify_area_bounds(&finite, BoundCase::FiniteW { w: 0 }, &samples).unwrap();
    assert!((t.coeff - 4.0).abs() < 1e-12);
    assert!(t.all_pass, "finite rows: {:#?}", t.rows);

    assert!(start.elapsed().as_secs() < 300);
    v.pass();
}

fn finite_w_scheme() -> PairingScheme {
    let square = Polygon::new(
        "f",
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ],
    )
    .unwrap();
    PairingScheme::build(
        MultiPolygon::new(vec![square]).unwrap(),
        vec![
            SegmentPairing {
                a_poly: 0,
                a_start: 0.0,
                b_poly: 0,
                b_start: 2.0,
                len: 1.0,
            },
            SegmentPairing {
                a_poly: 0,
                a_start: 1.0,
                b_poly: 0,
                b_start: 1.5,
                len: 0.5,
            },
        ],
        vec![TypeWSpec {
            poly: 0,
            side_start: 3.0,
            side_len: 1.0,
            a: SeqSpec::List(vec![0.15, 0.06, 0.04]),
            b: SeqSpec::List(vec![0.15, 0.06, 0.04]),
            depth: 8,
        }],
        vec![],
    )
    .unwrap()
}

#[test]
fn criterion_4_constant_extends_to_large_radii() {
    let v = Verdict::start(4, "regularity constant extends to large radii");
    let start = std::time::Instant::now();
    let ex = scheme("example-1.3");
    let centers = [
        Point2::new(0.0, 0.25),
        Point2::new(0.0, 0.625),
        Point2::new(0.5, 0.5),
        Point2::new(0.3, 0.0),
        Point2::new(1.0, 0.5),
        Point2::new(0.2, 0.7),
    ];
    let rep = regularity_scan(&ex, &centers, &log_radii(0.005, 0.1, 8)).unwrap();
    assert!((rep.r0 - 0.5).abs() < 1e-12, "r0 {}", rep.r0);
    let c = extension_constant(rep.c0, ex.domain.total_area(), rep.r0);
    assert_eq!(c, rep.extended_c);

    // Spot-check 20 radii between r0 and the diameter.
    let diam = ex.domain.diam(Metric::Max);
    for (i, &r) in log_radii(rep.r0, 0.98 * diam, 20).iter().enumerate() {
        let center = centers[i % centers.len()];
        let dec = decompose_ball(&ex, center, r).unwrap();
        let area = union_area(&ex, &dec.pieces).value;
        assert!(
            area <= c * r * r + 1e-6,
            "upper bound at r={r}: {area} vs {}",
            c * r * r
        );
        assert!(
            area >= r * r / c - dec.tail_area_bound - 1e-6,
            "lower bound at r={r}: {area} vs {}",
            r * r / c
        );
    }
    assert!(start.elapsed().as_secs() < 60);
    v.pass();
}

#[test]
fn criterion_5_linear_local_connectivity() {
    let v = Verdict::start(5, "linear local connectivity");
    let start = std::time::Instant::now();
    let ex = scheme("example-1.3");
    let d_min = ex.domain.d_min(Metric::Max);
    let diam = ex.domain.diam(Metric::Max);
    let lambda = 4.0 * diam / d_min;
    let r0 = d_min / 2.0;

    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut fixed = vec![
        Point2::new(0.0, 0.25),
        Point2::new(0.0, 0.625),
        Point2::new(1.0, 0.5),
        Point2::new(0.5, 0.0),
    ];
    for &r in &[0.2, 0.3, 0.4] {
        assert!(r <= r0);
        let grid = build_grid(&ex, r / 100.0).unwrap();
        let mut samples: Vec<(Point2, f64)> = fixed.iter().map(|&c| (c, r)).collect();
        while samples.len() < 10 {
            samples.push((random_point_in(&ex, &mut rng), r));
        }
        let report = llc_check(&ex, &grid, lambda, &samples, 5, 505).unwrap();
        assert!(
            report.all_pass,
            "llc failures at r={r}: {:?}",
            report
                .samples
                .iter()
                .filter(|s| !s.llc1_ok || !s.llc2_ok)
                .collect::<Vec<_>>()
        );
        for &(c, r) in &samples {
            assert!(
                complement_connected(&ex, &grid, c, r).unwrap(),
                "complement disconnected at ({}, {}), r={r}",
                c.x,
                c.y
            );
        }
        fixed.rotate_left(1);
    }
    assert!(start.elapsed().as_secs() < 300);
    v.pass();
}

#[test]
fn criterion_6_horseshoe_growth() {
    let v = Verdict::start(6, "horseshoe area growth vs flat contrast");
    let start = std::time::Instant::now();
    let ks: Vec<u32> = (3..=10).collect();

    let t = horseshoe_area_experiment(18, &ks).unwrap();
    for w in t.rows.windows(2) {
        assert!(
            w[1].ratio > w[0].ratio,
            "ratio not strictly increasing: {:?}",
            t.rows
        );
    }
    assert!(t.slope > 0.0, "slope {}", t.slope);
    assert!(t.r_squared >= 0.99, "R^2 {}", t.r_squared);

    // Same pipeline at the accumulation point of a scheme with balanced
    // alternating runs: the ratio stays flat.
    let mut file = builtin("example-1.3").unwrap();
    for p in &mut file.pairings {
        if let PairingFile::W { depth, .. } = p {
            *depth = 20;
        }
    }
    let ex = file.to_scheme().unwrap();
    let flat = area_growth_fit(&ex, Point2::new(0.0, 0.25), &ks).unwrap();
    assert!(flat.slope.abs() < 0.05, "contrast slope {}", flat.slope);

    assert!(start.elapsed().as_secs() < 120);
    v.pass();
}

#[test]
fn criterion_7_builtin_scheme_classification() {
    let v = Verdict::start(7, "builtin scheme classification");
    let torus = scheme("torus");
    assert!(torus.check_full().ok);
    assert!(!torus.check_unlinked(false).plain);
    assert!(torus.check_unlinked(false).witness.is_some());

    let ex = scheme("example-1.3");
    assert!(ex.check_full().ok);
    assert!(ex.check_unlinked(false).plain);
    assert_eq!(singular_class_count(&ex), 1);

    let hs = scheme("tight-horseshoe");
    assert!(hs.check_full().ok);

    let four = scheme("four-rectangle");
    assert!(four.check_full().ok);
    assert!(!four.check_unlinked(false).plain);
    assert!(four.check_unlinked(true).plain);
    v.pass();
}

#[test]
fn criterion_8_pairing_split_invariance() {
    let v = Verdict::start(8, "pairing split invariance");
    let start = std::time::Instant::now();
    for name in ["example-1.3", "four-rectangle"] {
        let s = scheme(name);
        // Split the first gluing; 0.35 keeps the halves aligned with the
        // h = 0.05 sample lattice so the chain graphs stay comparable.
        let split = s.split_pairing(0, 0.35).unwrap();
        assert_eq!(split.expanded.len(), s.expanded.len() + 1);
        let opts = QuotientOpts::new(Metric::Max, 0.05);
        let mut rng = ChaCha8Rng::seed_from_u64(808);
        for _ in 0..20 {
            let x = random_point_in(&s, &mut rng);
            let y = random_point_in(&s, &mut rng);
            let r = rng.gen_range(0.02..0.15);
            let d1 = quotient_distance(&s, x, y, &opts).unwrap().value;
            let d2 = quotient_distance(&split, x, y, &opts).unwrap().value;
            assert!(
                (d1 - d2).abs() < 1e-6,
                "{name}: distance changed under split: {d1} vs {d2}"
            );
            let a1 = union_area(&s, &decompose_ball(&s, x, r).unwrap().pieces).value;
            let a2 = union_area(&split, &decompose_ball(&split, x, r).unwrap().pieces).value;
            assert!(
                (a1 - a2).abs() < 1e-6,
                "{name}: ball area changed under split: {a1} vs {a2}"
            );
        }
    }
    assert!(start.elapsed().as_secs() < 120);
    v.pass();
}
