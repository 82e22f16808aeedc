//! Areas of ball decompositions and the Ahlfors 2-regularity scan.
//!
//! Areas are Lebesgue areas of unions of clipped box pieces: exact for
//! axis-aligned polygons via a sweep over compressed x-slabs, stratified
//! Monte-Carlo (fixed seed) otherwise.

use crate::balls::{decompose_ball, BallError, BallPiece};
use crate::geometry::{Metric, Point2};
use crate::scheme::{PairingScheme, SeqSpec};
use rand::{Rng, SeedableRng};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error(transparent)]
    Ball(#[from] BallError),
    #[error("no centers or radii to scan")]
    EmptyGrid,
    #[error("bound case not applicable: {0}")]
    NotApplicable(String),
}

pub const MONTE_CARLO_SEED: u64 = 0x5eed_2d2d;

#[derive(Debug, Clone, Copy)]
pub struct AreaEstimate {
    pub value: f64,
    pub exact: bool,
    /// Standard error for Monte-Carlo estimates; 0 for exact ones.
    pub std_err: f64,
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

/// Horizontal slabs of an axis-aligned polygon: for each y-interval the
/// x-intervals covered by the polygon.
fn axis_slabs(pg: &crate::geometry::Polygon) -> Vec<(f64, f64, Vec<(f64, f64)>)> {
    let verts = pg.vertices();
    let mut ys: Vec<f64> = verts.iter().map(|v| v.y).collect();
    ys.sort_by(f64::total_cmp);
    ys.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut out = vec![];
    for w in ys.windows(2) {
        let (y0, y1) = (w[0], w[1]);
        let mid = 0.5 * (y0 + y1);
        // Vertical edges crossing the slab midline.
        let mut xs = vec![];
        for k in 0..verts.len() {
            let a = verts[k];
            let b = verts[(k + 1) % verts.len()];
            if (a.x - b.x).abs() < 1e-12 && (a.y.min(b.y) < mid) && (a.y.max(b.y) > mid) {
                xs.push(a.x);
            }
        }
        xs.sort_by(f64::total_cmp);
        let spans = xs.chunks(2).filter(|c| c.len() == 2).map(|c| (c[0], c[1])).collect();
        out.push((y0, y1, spans));
    }
    out
}

fn clip_piece_rects(pg: &crate::geometry::Polygon, piece: &BallPiece) -> Vec<Rect> {
    let (bx0, bx1) = (piece.center.x - piece.radius, piece.center.x + piece.radius);
    let (by0, by1) = (piece.center.y - piece.radius, piece.center.y + piece.radius);
    let mut out = vec![];
    for (y0, y1, spans) in axis_slabs(pg) {
        let (cy0, cy1) = (y0.max(by0), y1.min(by1));
        if cy1 - cy0 <= 1e-15 {
            continue;
        }
        for (x0, x1) in spans {
            let (cx0, cx1) = (x0.max(bx0), x1.min(bx1));
            if cx1 - cx0 > 1e-15 {
                out.push(Rect {
                    x0: cx0,
                    x1: cx1,
                    y0: cy0,
                    y1: cy1,
                });
            }
        }
    }
    out
}

fn rect_union_area(rects: &[Rect]) -> f64 {
    let mut xs: Vec<f64> = rects.iter().flat_map(|r| [r.x0, r.x1]).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let mut area = 0.0;
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let mid = 0.5 * (x0 + x1);
        let mut ivs: Vec<(f64, f64)> = rects
            .iter()
            .filter(|r| r.x0 <= mid && r.x1 >= mid)
            .map(|r| (r.y0, r.y1))
            .collect();
        ivs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut covered = 0.0;
        let mut cur: Option<(f64, f64)> = None;
        for (a, b) in ivs {
            match cur {
                Some((c0, c1)) if a <= c1 => cur = Some((c0, c1.max(b))),
                Some((c0, c1)) => {
                    covered += c1 - c0;
                    cur = Some((a, b));
                    let _ = c0;
                }
                None => cur = Some((a, b)),
            }
        }
        if let Some((c0, c1)) = cur {
            covered += c1 - c0;
        }
        area += (x1 - x0) * covered;
    }
    area
}

/// Lebesgue area of the union of clipped pieces. Exact when every involved
/// polygon is axis-aligned; stratified Monte-Carlo otherwise.
pub fn union_area(scheme: &PairingScheme, pieces: &[BallPiece]) -> AreaEstimate {
    if pieces.is_empty() {
        return AreaEstimate {
            value: 0.0,
            exact: true,
            std_err: 0.0,
        };
    }
    let all_axis = pieces
        .iter()
        .all(|p| scheme.domain.polygons[p.poly].is_axis_aligned());
    if all_axis {
        // Polygons are disjoint, so per-polygon unions add up.
        let mut total = 0.0;
        for (i, pg) in scheme.domain.polygons.iter().enumerate() {
            let rects: Vec<Rect> = pieces
                .iter()
                .filter(|p| p.poly == i)
                .flat_map(|p| clip_piece_rects(pg, p))
                .collect();
            total += rect_union_area(&rects);
        }
        return AreaEstimate {
            value: total,
            exact: true,
            std_err: 0.0,
        };
    }
    // Stratified Monte-Carlo over the union bounding box.
    let mut bx = (f64::INFINITY, f64::NEG_INFINITY);
    let mut by = (f64::INFINITY, f64::NEG_INFINITY);
    for p in pieces {
        bx.0 = bx.0.min(p.center.x - p.radius);
        bx.1 = bx.1.max(p.center.x + p.radius);
        by.0 = by.0.min(p.center.y - p.radius);
        by.1 = by.1.max(p.center.y + p.radius);
    }
    let m = 450usize; // 202_500 strata
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(MONTE_CARLO_SEED);
    let mut hit = 0u64;
    let n = (m * m) as u64;
    for i in 0..m {
        for j in 0..m {
            let x = bx.0 + (bx.1 - bx.0) * (i as f64 + rng.gen::<f64>()) / m as f64;
            let y = by.0 + (by.1 - by.0) * (j as f64 + rng.gen::<f64>()) / m as f64;
            let q = Point2::new(x, y);
            if pieces
                .iter()
                .any(|p| p.box_contains(q) && scheme.domain.polygons[p.poly].contains(q))
            {
                hit += 1;
            }
        }
    }
    let area_box = (bx.1 - bx.0) * (by.1 - by.0);
    let p = hit as f64 / n as f64;
    AreaEstimate {
        value: area_box * p,
        exact: false,
        std_err: area_box * (p * (1.0 - p) / n as f64).sqrt(),
    }
}

#[derive(Debug, Clone)]
pub struct BallArea {
    pub area: AreaEstimate,
    pub tail_area_bound: f64,
    pub pieces: usize,
}

pub fn ball_area(scheme: &PairingScheme, center: Point2, r: f64) -> Result<BallArea, MeasureError> {
    let dec = decompose_ball(scheme, center, r)?;
    Ok(BallArea {
        area: union_area(scheme, &dec.pieces),
        tail_area_bound: dec.tail_area_bound,
        pieces: dec.pieces.len(),
    })
}

/// Smallest constant `K` with `sum_{i>n} b_i <= K * sum_{i>n} a_i` over all
/// tails (used in the accumulation-ball upper bound).
pub fn tail_ratio_constant(a: &SeqSpec, b: &SeqSpec, depth: usize) -> f64 {
    let n_max = a.count().unwrap_or(depth).min(depth);
    (0..=n_max)
        .map(|n| {
            let ta = a.tail(n);
            if ta <= 0.0 {
                0.0
            } else {
                b.tail(n) / ta
            }
        })
        .fold(0.0, f64::max)
}

/// Smallest constant with `sum_{i=j}^{k} b_i <= K * sum_{i=j}^{k} a_i` over
/// all windows (used in the conic-ball upper bound).
pub fn window_ratio_constant(a: &SeqSpec, b: &SeqSpec, depth: usize) -> f64 {
    let n_max = a.count().unwrap_or(depth).min(depth);
    let mut best = 0.0f64;
    for j in 0..n_max {
        let (mut sa, mut sb) = (0.0, 0.0);
        for k in j..n_max {
            sa += a.term(k);
            sb += b.term(k);
            if sa > 0.0 {
                best = best.max(sb / sa);
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy)]
pub struct RegularitySample {
    pub center: Point2,
    pub r: f64,
    pub area: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Violation {
    pub center: Point2,
    pub slope: f64,
}

#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub r0: f64,
    pub k: f64,
    pub d_min: f64,
    pub samples: Vec<RegularitySample>,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub c0: f64,
    pub extended_c: f64,
    /// Centers whose ratio grows systematically in log(1/r).
    pub violations: Vec<Violation>,
    pub regular: bool,
}

/// Extension of the small-radius constant to all radii up to the diameter:
/// `C = max(c0, area / r0^2)`.
pub fn extension_constant(c0: f64, total_area: f64, r0: f64) -> f64 {
    c0.max(total_area / (r0 * r0))
}

/// Per-center slope of ratio against log2(1/r) above which the scan flags
/// systematic growth.
pub const GROWTH_SLOPE_LIMIT: f64 = 0.2;

/// Samples `area(B(c, r)) / r^2` on the grid of centers and radii and
/// reports the regularity constants.
pub fn regularity_scan(
    scheme: &PairingScheme,
    centers: &[Point2],
    radii: &[f64],
) -> Result<RegularityReport, MeasureError> {
    if centers.is_empty() || radii.is_empty() {
        return Err(MeasureError::EmptyGrid);
    }
    let d_min = scheme.domain.d_min(Metric::Max);
    let diam = scheme.domain.diam(Metric::Max);
    let k = diam / d_min;
    let r0 = d_min / 2.0;
    let mut samples = vec![];
    let mut violations = vec![];
    for &c in centers {
        let mut xs = vec![];
        let mut ys = vec![];
        for &r in radii {
            let ba = ball_area(scheme, c, r)?;
            let ratio = ba.area.value / (r * r);
            samples.push(RegularitySample {
                center: c,
                r,
                area: ba.area.value,
                ratio,
            });
            xs.push((1.0 / r).log2());
            ys.push(ratio);
        }
        if xs.len() >= 3 {
            let (slope, _, _) = linear_fit(&xs, &ys);
            if slope > GROWTH_SLOPE_LIMIT {
                violations.push(Violation { center: c, slope });
            }
        }
    }
    let ratio_min = samples.iter().map(|s| s.ratio).fold(f64::INFINITY, f64::min);
    let ratio_max = samples.iter().map(|s| s.ratio).fold(0.0, f64::max);
    let c0 = ratio_max.max(1.0 / ratio_min);
    let extended_c = extension_constant(c0, scheme.domain.total_area(), r0);
    let regular = violations.is_empty() && ratio_min > 0.0 && ratio_max.is_finite();
    Ok(RegularityReport {
        r0,
        k,
        d_min,
        samples,
        ratio_min,
        ratio_max,
        c0,
        extended_c,
        violations,
        regular,
    })
}

/// Which case-by-case area bound to verify.
#[derive(Debug, Clone, Copy)]
pub enum BoundCase {
    /// Balls near the accumulation of the `w`-th alternating side:
    /// `area <= (2K' + 7/2) r^2`.
    Accumulation { w: usize },
    /// Balls at a junction of the `w`-th side: `area <= (10 + 4K'') r^2`.
    Conic { w: usize },
    /// Finite alternating side with `n_F` terms: `area <= (n_F + 1) r^2`.
    FiniteW { w: usize },
    /// Away from alternating sides: `area <= 4 r^2`.
    Regular,
}

#[derive(Debug, Clone, Copy)]
pub struct BoundRow {
    pub center: Point2,
    pub r: f64,
    pub area: f64,
    pub upper: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct BoundsTable {
    /// Upper bound as a multiple of r^2.
    pub coeff: f64,
    pub rows: Vec<BoundRow>,
    pub all_pass: bool,
}

/// Checks `2 r^2 <= area <= coeff * r^2` for every sample, with the case
/// coefficient computed from the scheme's sequences.
pub fn verify_area_bounds(
    scheme: &PairingScheme,
    case: BoundCase,
    samples: &[(Point2, f64)],
) -> Result<BoundsTable, MeasureError> {
    let spec_at = |w: usize| {
        scheme
            .w_specs
            .get(w)
            .ok_or_else(|| MeasureError::NotApplicable(format!("no alternating side {w}")))
    };
    let coeff = match case {
        BoundCase::Accumulation { w } => {
            let spec = spec_at(w)?;
            if spec.a.count().is_some() {
                return Err(MeasureError::NotApplicable(
                    "accumulation bound needs an infinite side".into(),
                ));
            }
            2.0 * tail_ratio_constant(&spec.a, &spec.b, spec.depth.max(64)) + 3.5
        }
        BoundCase::Conic { w } => {
            let spec = spec_at(w)?;
            10.0 + 4.0 * window_ratio_constant(&spec.a, &spec.b, spec.depth.max(64))
        }
        BoundCase::FiniteW { w } => {
            let spec = spec_at(w)?;
            let n_f = spec.a.count().ok_or_else(|| {
                MeasureError::NotApplicable("finite bound needs a finite side".into())
            })?;
            (n_f + 1) as f64
        }
        BoundCase::Regular => 4.0,
    };
    let mut rows = vec![];
    for &(c, r) in samples {
        let ba = ball_area(scheme, c, r)?;
        let area = ba.area.value;
        let upper = coeff * r * r;
        let tol = 1e-9 + ba.area.std_err * 3.0;
        let pass = area >= 2.0 * r * r - ba.tail_area_bound - tol && area <= upper + tol;
        rows.push(BoundRow {
            center: c,
            r,
            area,
            upper,
            pass,
        });
    }
    let all_pass = rows.iter().all(|r| r.pass);
    Ok(BoundsTable {
        coeff,
        rows,
        all_pass,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct LipschitzReport {
    pub containment_ok: bool,
    /// Max-metric to Euclidean area ratio for the sampled balls (4/pi for
    /// interior balls).
    pub area_ratio: f64,
}

/// Numerical check that the max and Euclidean metrics are sqrt(2)-Lipschitz
/// equivalent: `B_euc(x,r) <= B_max(x,r) <= B_euc(x, sqrt(2) r)` on random
/// probes, plus the interior-ball area ratio.
pub fn lipschitz_equivalence_check(seed: u64, n: usize) -> LipschitzReport {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut ok = true;
    for _ in 0..n {
        let x = Point2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let p = Point2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let r = rng.gen_range(0.01..1.0);
        let de = Metric::Euclidean.dist(x, p);
        let dm = Metric::Max.dist(x, p);
        if de <= r && dm > r {
            ok = false;
        }
        if dm <= r && de > 2f64.sqrt() * r + 1e-12 {
            ok = false;
        }
    }
    LipschitzReport {
        containment_ok: ok,
        area_ratio: 4.0 / std::f64::consts::PI,
    }
}

/// Least-squares line fit: returns (slope, intercept, R^2).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, intercept, r2)
}

/// `n` log-spaced radii from `lo` to `hi` inclusive.
pub fn log_radii(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1).max(1) as f64))
        .collect()
}
