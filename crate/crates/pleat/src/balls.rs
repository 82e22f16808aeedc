//! Closed-form decompositions of metric balls in the quotient, in the max
//! metric. A ball around a point is represented as a union of axis-box
//! pieces (each clipped to its polygon), produced by a worklist that follows
//! identifications: seeds at every member of the center's class, spawns at
//! vertex/conic/accumulation boundary points, and sliding covers where a
//! piece flows through the planar interior of a paired segment.

use crate::geometry::{GeomError, Metric, Point2, GEOM_EPS};
use crate::scheme::{BoundaryPoint, PairingScheme, PointClass};
use std::collections::{BinaryHeap, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BallError {
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error("center ({0}, {1}) lies outside the domain")]
    OutsideDomain(f64, f64),
    #[error("ball radius must be positive")]
    BadRadius,
    #[error("piece count exceeded the cap of {0}")]
    TooManyPieces(usize),
    #[error("index {0} does not name an alternating-side generator")]
    NoWSpec(usize),
}

/// How a piece entered the decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Main,
    /// Spawned through the class of the i-th special boundary point.
    ConicSpawn(usize),
    AccumulationSpawn(usize),
    VertexSpawn(usize),
    /// Sliding cover through the planar interior of the i-th pairing.
    CrossingSpawn(usize),
}

/// One axis-box piece `[cx-r, cx+r] x [cy-r, cy+r]`, clipped to its polygon.
#[derive(Debug, Clone, Copy)]
pub struct BallPiece {
    pub poly: usize,
    pub center: Point2,
    pub radius: f64,
    pub provenance: Provenance,
}

impl BallPiece {
    /// Closed-box membership (before polygon clipping).
    pub fn box_contains(&self, q: Point2) -> bool {
        Metric::Max.dist(self.center, q) <= self.radius + 1e-12
    }
}

#[derive(Debug, Clone)]
pub struct BallDecomposition {
    pub center: Point2,
    pub r: f64,
    pub pieces: Vec<BallPiece>,
    /// Upper bound for the area the pieces may miss relative to the true
    /// ball (truncated infinite classes, staircase undershoot, sub-epsilon
    /// pieces). The decomposition itself is always an inner approximation.
    pub tail_area_bound: f64,
    /// Class of the center when it lies on the boundary.
    pub center_class: Option<PointClass>,
}

#[derive(Debug, Clone, Copy)]
pub struct BallOpts {
    /// Pieces below `eps_min_factor * r` are dropped into the tail bound.
    pub eps_min_factor: f64,
    /// Staircase step tolerance for crossing covers, relative to `r`.
    pub stair_tol_factor: f64,
    pub max_pieces: usize,
}

impl Default for BallOpts {
    fn default() -> Self {
        BallOpts {
            eps_min_factor: 1e-4,
            stair_tol_factor: 2e-3,
            max_pieces: 200_000,
        }
    }
}

struct QItem(BallPiece);

impl PartialEq for QItem {
    fn eq(&self, other: &Self) -> bool {
        self.0.radius == other.0.radius
    }
}
impl Eq for QItem {}
impl PartialOrd for QItem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for QItem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.radius.total_cmp(&other.0.radius)
    }
}

/// Deduplicated list of boundary points where cone behaviour can occur:
/// polygon vertices, pairing endpoints, and accumulation points.
fn special_points(scheme: &PairingScheme) -> Vec<(BoundaryPoint, Point2)> {
    let mut out: Vec<(BoundaryPoint, Point2)> = vec![];
    let push = |poly: usize, s: f64, out: &mut Vec<(BoundaryPoint, Point2)>| {
        let pg = &scheme.domain.polygons[poly];
        let s = pg.normalize_s(s);
        let perim = pg.perimeter();
        let dup = out.iter().any(|(bp, _)| {
            bp.poly == poly && {
                let d = (bp.s - s).abs();
                d < 1e-9 || perim - d < 1e-9
            }
        });
        if !dup {
            out.push((BoundaryPoint { poly, s }, pg.arc_length_point(s)));
        }
    };
    for (i, pg) in scheme.domain.polygons.iter().enumerate() {
        let verts = pg.vertices();
        let mut acc = 0.0;
        for k in 0..verts.len() {
            push(i, acc, &mut out);
            let next = verts[(k + 1) % verts.len()];
            acc += ((next.x - verts[k].x).powi(2) + (next.y - verts[k].y).powi(2)).sqrt();
        }
    }
    for p in &scheme.expanded {
        push(p.a_poly, p.a_start, &mut out);
        push(p.a_poly, p.a_start + p.len, &mut out);
        push(p.b_poly, p.b_start, &mut out);
        push(p.b_poly, p.b_start + p.len, &mut out);
    }
    for sp in &scheme.singular_points {
        push(sp.poly, sp.s, &mut out);
    }
    out
}

struct Decomposer<'a> {
    scheme: &'a PairingScheme,
    specials: Vec<(BoundaryPoint, Point2)>,
    classes: HashMap<(usize, i64), (Vec<BoundaryPoint>, bool)>,
    eps_min: f64,
    stair_tol: f64,
    tail: f64,
    /// Largest radius spawned through each singular or capped class; the
    /// omitted members are charged to the tail once, at that radius.
    sing_tail: HashMap<usize, f64>,
}

impl<'a> Decomposer<'a> {
    fn class(&mut self, bp: BoundaryPoint) -> &(Vec<BoundaryPoint>, bool) {
        let key = (bp.poly, (bp.s * 1e9).round() as i64);
        if !self.classes.contains_key(&key) {
            let v = self.scheme.identify(bp);
            self.classes.insert(key, v);
        }
        &self.classes[&key]
    }

    fn pos(&self, bp: BoundaryPoint) -> Point2 {
        self.scheme.domain.polygons[bp.poly].arc_length_point(bp.s)
    }

    /// Distance from `c` to `q` within polygon `poly`, valid as a quotient
    /// upper bound (intrinsic for non-convex polygons).
    fn inner_dist(&self, poly: usize, c: Point2, q: Point2) -> Result<f64, BallError> {
        let pg = &self.scheme.domain.polygons[poly];
        if pg.is_convex() {
            Ok(Metric::Max.dist(c, q))
        } else {
            Ok(pg.intrinsic_distance(c, q, Metric::Max)?)
        }
    }

    fn spawn_specials(
        &mut self,
        piece: &BallPiece,
        queue: &mut BinaryHeap<QItem>,
    ) -> Result<(), BallError> {
        for i in 0..self.specials.len() {
            let (bp, pos) = self.specials[i];
            if bp.poly != piece.poly {
                continue;
            }
            if Metric::Max.dist(piece.center, pos) >= piece.radius {
                continue;
            }
            let d = self.inner_dist(piece.poly, piece.center, pos)?;
            let rad = piece.radius - d;
            if rad <= self.eps_min {
                self.tail += 4.0 * rad.max(0.0).powi(2);
                continue;
            }
            let singular = self.scheme.is_singular_point(bp);
            let provenance = if singular {
                Provenance::AccumulationSpawn(i)
            } else if self.scheme.domain.polygons[bp.poly].is_vertex_coord(bp.s) {
                Provenance::VertexSpawn(i)
            } else {
                Provenance::ConicSpawn(i)
            };
            let (members, truncated) = self.class(bp).clone();
            if truncated || singular {
                // Omitted members (capped chains, or endpoints of folds
                // beyond the expansion depth) cluster within the unexpanded
                // tail arcs next to an existing member.
                let e = self.sing_tail.entry(i).or_insert(0.0);
                *e = e.max(rad);
            }
            for m in members {
                queue.push(QItem(BallPiece {
                    poly: m.poly,
                    center: self.pos(m),
                    radius: rad,
                    provenance,
                }));
            }
        }
        Ok(())
    }

    /// Sub-intervals of the boundary arc `[start, start+len]` lying on single
    /// straight sides (split at vertex coordinates).
    fn straight_arcs(&self, poly: usize, start: f64, len: f64) -> Vec<(f64, f64)> {
        let pg = &self.scheme.domain.polygons[poly];
        let perim = pg.perimeter();
        let verts = pg.vertices();
        let mut cuts = vec![start, start + len];
        let mut acc = 0.0;
        for k in 0..verts.len() {
            for lift in [-1.0, 0.0, 1.0, 2.0] {
                let s = acc + lift * perim;
                if s > start + 1e-12 && s < start + len - 1e-12 {
                    cuts.push(s);
                }
            }
            let next = verts[(k + 1) % verts.len()];
            acc += ((next.x - verts[k].x).powi(2) + (next.y - verts[k].y).powi(2)).sqrt();
        }
        cuts.sort_by(f64::total_cmp);
        cuts.windows(2)
            .filter(|w| w[1] - w[0] > 1e-12)
            .map(|w| (w[0], w[1]))
            .collect()
    }

    /// Sliding covers for the part of `piece` flowing through the planar
    /// interior of pairing `idx`.
    fn spawn_crossings(
        &mut self,
        piece: &BallPiece,
        idx: usize,
        r_ball: f64,
        queue: &mut BinaryHeap<QItem>,
    ) -> Result<(), BallError> {
        let p = self.scheme.expanded[idx];
        let sides = [
            (p.a_poly, p.a_start, p.b_poly, p.b_start),
            (p.b_poly, p.b_start, p.a_poly, p.a_start),
        ];
        for (side_poly, side_start, other_poly, other_start) in sides {
            if side_poly != piece.poly {
                continue;
            }
            let pg = &self.scheme.domain.polygons[side_poly];
            let convex = pg.is_convex();
            for (u0, u1) in self.straight_arcs(side_poly, side_start, p.len) {
                let e0 = pg.arc_length_point(pg.normalize_s(u0));
                let e1 = pg.arc_length_point(pg.normalize_s(u1));
                let inv = 1.0 / (u1 - u0);
                let dir = Point2::new((e1.x - e0.x) * inv, (e1.y - e0.y) * inv);
                let pt = |s: f64| {
                    Point2::new(e0.x + (s - u0) * dir.x, e0.y + (s - u0) * dir.y)
                };
                let c = piece.center;
                let f = |s: f64| Metric::Max.dist(c, pt(s));
                // f is piecewise affine in s; cut at its breakpoints.
                let mut cuts = vec![u0, u1];
                let lin = [
                    (c.x - e0.x + u0 * dir.x, -dir.x),
                    (c.y - e0.y + u0 * dir.y, -dir.y),
                    (
                        (c.x - e0.x + u0 * dir.x) - (c.y - e0.y + u0 * dir.y),
                        -dir.x + dir.y,
                    ),
                    (
                        (c.x - e0.x + u0 * dir.x) + (c.y - e0.y + u0 * dir.y),
                        -dir.x - dir.y,
                    ),
                ];
                for (a0, b0) in lin {
                    if b0.abs() > 1e-15 {
                        let s = -a0 / b0;
                        if s > u0 + 1e-12 && s < u1 - 1e-12 {
                            cuts.push(s);
                        }
                    }
                }
                cuts.sort_by(f64::total_cmp);
                for w in cuts.windows(2) {
                    let (mut a, mut b) = (w[0], w[1]);
                    if b - a < 1e-12 {
                        continue;
                    }
                    let (fa, fb) = (f(a), f(b));
                    if fa.min(fb) >= piece.radius - self.eps_min {
                        continue;
                    }
                    // Clip the cell to the region f < radius.
                    if (fb - fa).abs() > 1e-15 {
                        let (a0, b0) = (a, b);
                        let s_at = |v: f64| a0 + (b0 - a0) * (v - fa) / (fb - fa);
                        if fa >= piece.radius {
                            a = s_at(piece.radius);
                        }
                        if fb >= piece.radius {
                            b = s_at(piece.radius);
                        }
                    }
                    if b - a < 1e-12 {
                        continue;
                    }
                    let var = (f(b) - f(a)).abs();
                    let nsteps = ((var / (self.stair_tol * r_ball)).ceil() as usize).max(1);
                    self.tail += var / nsteps as f64 * (b - a);
                    let dt = (b - a) / nsteps as f64;
                    for k in 0..nsteps {
                        let s0 = a + k as f64 * dt;
                        let s1 = s0 + dt;
                        let fmax = if convex {
                            f(s0).max(f(s1))
                        } else {
                            // Conservative: intrinsic distance plus the
                            // Lipschitz slack over the step.
                            self.inner_dist(side_poly, c, pt(0.5 * (s0 + s1)))? + 0.5 * dt
                        };
                        let rad = piece.radius - fmax;
                        if rad <= self.eps_min {
                            self.tail += 2.0 * dt * self.eps_min;
                            continue;
                        }
                        // Partner arcs of [s0, s1].
                        let t0 = s0 - side_start;
                        let m0 = other_start + (p.len - t0);
                        let m1 = m0 - dt;
                        let og = &self.scheme.domain.polygons[other_poly];
                        let q0 = og.arc_length_point(og.normalize_s(m0));
                        let q1 = og.arc_length_point(og.normalize_s(m1));
                        let axis =
                            (q1.x - q0.x).abs() < 1e-9 || (q1.y - q0.y).abs() < 1e-9;
                        let space = if axis { 1.998 * rad } else { 0.25 * rad };
                        let ncent = ((dt / space).ceil() as usize).max(1);
                        for j in 0..=ncent {
                            let m = m0 + (m1 - m0) * j as f64 / ncent as f64;
                            queue.push(QItem(BallPiece {
                                poly: other_poly,
                                center: og.arc_length_point(og.normalize_s(m)),
                                radius: rad,
                                provenance: Provenance::CrossingSpawn(idx),
                            }));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn decompose_ball(
    scheme: &PairingScheme,
    center: Point2,
    r: f64,
) -> Result<BallDecomposition, BallError> {
    decompose_ball_with(scheme, center, r, &BallOpts::default())
}

pub fn decompose_ball_with(
    scheme: &PairingScheme,
    center: Point2,
    r: f64,
    opts: &BallOpts,
) -> Result<BallDecomposition, BallError> {
    if !(r > 0.0) {
        return Err(BallError::BadRadius);
    }
    let poly = scheme
        .domain
        .polygon_containing(center)
        .ok_or(BallError::OutsideDomain(center.x, center.y))?;
    let mut dec = Decomposer {
        scheme,
        specials: special_points(scheme),
        classes: HashMap::new(),
        eps_min: r * opts.eps_min_factor,
        stair_tol: opts.stair_tol_factor,
        tail: 0.0,
        sing_tail: HashMap::new(),
    };
    let mut queue: BinaryHeap<QItem> = BinaryHeap::new();
    let mut center_class = None;
    match scheme.domain.polygons[poly].boundary_coord(center, 1e-7) {
        Some(s) => {
            let cls = scheme.classify_point(BoundaryPoint { poly, s });
            let touches_accumulation = cls
                .members
                .iter()
                .any(|&m| scheme.is_singular_point(m));
            if cls.truncated || touches_accumulation {
                dec.sing_tail.insert(usize::MAX, r);
            }
            for m in &cls.members {
                queue.push(QItem(BallPiece {
                    poly: m.poly,
                    center: dec.pos(*m),
                    radius: r,
                    provenance: Provenance::Main,
                }));
            }
            center_class = Some(cls);
        }
        None => queue.push(QItem(BallPiece {
            poly,
            center,
            radius: r,
            provenance: Provenance::Main,
        })),
    }
    let mut accepted: Vec<BallPiece> = vec![];
    while let Some(QItem(piece)) = queue.pop() {
        if piece.radius <= dec.eps_min {
            dec.tail += 4.0 * piece.radius.max(0.0).powi(2);
            continue;
        }
        let dominated = accepted.iter().any(|a| {
            a.poly == piece.poly
                && Metric::Max.dist(a.center, piece.center) + piece.radius
                    <= a.radius + 1e-12
        });
        if dominated {
            continue;
        }
        accepted.retain(|a| {
            !(a.poly == piece.poly
                && Metric::Max.dist(a.center, piece.center) + a.radius
                    < piece.radius - 1e-12)
        });
        accepted.push(piece);
        if accepted.len() > opts.max_pieces {
            return Err(BallError::TooManyPieces(opts.max_pieces));
        }
        dec.spawn_specials(&piece, &mut queue)?;
        for idx in 0..scheme.expanded.len() {
            dec.spawn_crossings(&piece, idx, r, &mut queue)?;
        }
        if queue.len() > 4 * opts.max_pieces {
            return Err(BallError::TooManyPieces(opts.max_pieces));
        }
    }
    let tl = scheme.tail_pairing_len;
    for (_, rad) in dec.sing_tail.drain() {
        dec.tail += 8.0 * rad * tl + 4.0 * tl * tl;
    }
    Ok(BallDecomposition {
        center,
        r,
        pieces: accepted,
        tail_area_bound: dec.tail,
        center_class,
    })
}

/// Membership via the decomposition: inside some piece's box and polygon.
pub fn ball_contains(scheme: &PairingScheme, dec: &BallDecomposition, q: Point2) -> bool {
    dec.pieces.iter().any(|p| {
        p.box_contains(q) && scheme.domain.polygons[p.poly].contains(q)
    })
}

/// Where a schedule of spawn radii is centered on an alternating side.
#[derive(Debug, Clone, Copy)]
pub enum ScheduleCenter {
    /// The accumulation point of the side.
    Accumulation,
    /// The 3-pi junction with (0-based) index `s1`; radii spread both ways.
    Conic(usize),
}

/// The exact (index, radius) ladder of semi-ball spawns for a ball of radius
/// `r` centered at the accumulation or a junction of the `w`-th alternating
/// side. Only strictly positive radii are listed.
pub fn spawn_schedule(
    scheme: &PairingScheme,
    w: usize,
    center: ScheduleCenter,
    r: f64,
) -> Result<Vec<(usize, f64)>, BallError> {
    let spec = scheme.w_specs.get(w).ok_or(BallError::NoWSpec(w))?;
    let a = &spec.a;
    let n_max = a.count().unwrap_or(10_000);
    let mut out = vec![];
    match center {
        ScheduleCenter::Accumulation => {
            for i in 0..n_max {
                let rad = r - a.tail(i + 1);
                if rad > GEOM_EPS {
                    out.push((i, rad));
                }
                if a.tail(i + 1) < 1e-15 {
                    break;
                }
            }
        }
        ScheduleCenter::Conic(s1) => {
            for j in (0..s1).rev() {
                let rad = r - (a.partial(s1) - a.partial(j));
                if rad > GEOM_EPS {
                    out.push((j, rad));
                } else {
                    break;
                }
            }
            out.reverse();
            out.push((s1, r));
            for j in s1 + 1..=n_max {
                let rad = r - (a.partial(j) - a.partial(s1));
                if rad > GEOM_EPS {
                    out.push((j, rad));
                } else {
                    break;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{MultiPolygon, Polygon};
    use crate::scheme::{SegmentPairing, SeqSpec, TypeWSpec};

    fn unit_square(id: &str) -> Polygon {
        Polygon::new(
            id,
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(1.0, 0.0),
                Point2::new(1.0, 1.0),
                Point2::new(0.0, 1.0),
            ],
        )
        .unwrap()
    }

    fn w_square(depth: usize) -> PairingScheme {
        let mp = MultiPolygon::new(vec![unit_square("w")]).unwrap();
        PairingScheme::build(
            mp,
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
                a: SeqSpec::Geometric {
                    first: 0.125,
                    ratio: 2.0,
                },
                b: SeqSpec::Geometric {
                    first: 0.125,
                    ratio: 2.0,
                },
                depth,
            }],
            vec![],
        )
        .unwrap()
    }

    fn torus() -> PairingScheme {
        let mp = MultiPolygon::new(vec![unit_square("t")]).unwrap();
        PairingScheme::build(
            mp,
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
                    b_start: 3.0,
                    len: 1.0,
                },
            ],
            vec![],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn interior_center_is_one_full_piece() {
        let w = w_square(12);
        let d = decompose_ball(&w, Point2::new(0.5, 0.5), 0.05).unwrap();
        assert_eq!(d.pieces.len(), 1);
        assert_eq!(d.pieces[0].radius, 0.05);
        assert_eq!(d.pieces[0].provenance, Provenance::Main);
        assert!(d.center_class.is_none());
    }

    #[test]
    fn fold_crease_is_one_semi_ball() {
        // (1, 0.5) is the crease of the right-side fold: a single preimage
        // with cone angle pi; the box clips to a 2r x r semi-ball.
        let w = w_square(12);
        let d = decompose_ball(&w, Point2::new(1.0, 0.5), 0.05).unwrap();
        assert_eq!(d.pieces.len(), 1, "pieces: {:?}", d.pieces);
        assert!((d.pieces[0].radius - 0.05).abs() < 1e-12);
        let cls = d.center_class.unwrap();
        assert_eq!(cls.members.len(), 1);
    }

    #[test]
    fn planar_boundary_center_spawns_both_preimages() {
        let w = w_square(12);
        let d = decompose_ball(&w, Point2::new(0.3, 0.0), 0.04).unwrap();
        let full: Vec<_> = d
            .pieces
            .iter()
            .filter(|p| (p.radius - 0.04).abs() < 1e-12)
            .collect();
        assert_eq!(full.len(), 2);
        assert!(full
            .iter()
            .any(|p| Metric::Max.dist(p.center, Point2::new(0.3, 0.0)) < 1e-9));
        assert!(full
            .iter()
            .any(|p| Metric::Max.dist(p.center, Point2::new(0.3, 1.0)) < 1e-9));
    }

    #[test]
    fn accumulation_ladder_radii() {
        // Ball of radius 0.1 at the accumulation point (0, 0.25). The ladder
        // reaches the junctions at the start of each beta-run with radius
        // r minus the tail of the alpha lengths.
        let w = w_square(16);
        let r = 0.1;
        let d = decompose_ball(&w, Point2::new(0.0, 0.25), r).unwrap();
        let a = |i: i32| 0.125 / 2f64.powi(i);
        for i in 1..=3 {
            let tail: f64 = a(i); // geometric: tail beyond i equals a_i
            let arc = 3.0 + 3.0 * (0.25 - 2.0 * a(i)) + a(i);
            // position of the junction alpha_i / beta_i on the left side
            let pos = Point2::new(0.0, 1.0 - (arc - 3.0));
            let found = d
                .pieces
                .iter()
                .filter(|p| Metric::Max.dist(p.center, pos) < 1e-9)
                .map(|p| p.radius)
                .fold(0.0f64, f64::max);
            assert!(
                (found - (r - tail)).abs() < 1e-9,
                "i={i}: radius {found} vs {}",
                r - tail
            );
        }
        assert!(
            d.tail_area_bound < 0.02 * 4.0 * r * r,
            "tail {} with {} pieces",
            d.tail_area_bound,
            d.pieces.len()
        );
    }

    #[test]
    fn accumulation_schedule_matches_formula() {
        let w = w_square(16);
        let s = spawn_schedule(&w, 0, ScheduleCenter::Accumulation, 0.1).unwrap();
        assert_eq!(s[0].0, 1);
        assert!((s[0].1 - 0.0375).abs() < 1e-12);
        assert!((s[1].1 - 0.06875).abs() < 1e-12);
        assert!((s[2].1 - 0.084375).abs() < 1e-12);
        // Exact-tail radius excluded: r = tail beyond index 2.
        let s = spawn_schedule(&w, 0, ScheduleCenter::Accumulation, 0.03125).unwrap();
        assert_eq!(s[0].0, 3);
        assert!((s[0].1 - 0.015625).abs() < 1e-12);
        assert!(spawn_schedule(&w, 1, ScheduleCenter::Accumulation, 0.1).is_err());
    }

    #[test]
    fn conic_schedule_spreads_both_ways() {
        let w = w_square(16);
        let s = spawn_schedule(&w, 0, ScheduleCenter::Conic(2), 0.05).unwrap();
        assert_eq!(s[0], (2, 0.05));
        assert!((s[1].1 - 0.01875).abs() < 1e-12 && s[1].0 == 3);
        assert!((s[2].1 - 0.003125).abs() < 1e-12 && s[2].0 == 4);
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn junction_spawns_three_semi_balls() {
        // The first junction of the primed run at (0, 0.125) has a 3-pi cone:
        // three boundary preimages, each carrying a semi-ball.
        let w = w_square(16);
        let d = decompose_ball(&w, Point2::new(0.0, 0.125), 0.01).unwrap();
        let full: Vec<_> = d
            .pieces
            .iter()
            .filter(|p| (p.radius - 0.01).abs() < 1e-12)
            .collect();
        assert_eq!(full.len(), 3, "pieces: {:?}", d.pieces);
        for want in [
            Point2::new(0.0, 0.125),
            Point2::new(0.0, 0.625),
            Point2::new(0.0, 0.875),
        ] {
            assert!(full
                .iter()
                .any(|p| Metric::Max.dist(p.center, want) < 1e-9));
        }
    }

    #[test]
    fn torus_ball_wraps_across_the_glued_side() {
        let t = torus();
        let d = decompose_ball(&t, Point2::new(0.1, 0.5), 0.3).unwrap();
        assert!(ball_contains(&t, &d, Point2::new(0.1, 0.5)));
        assert!(ball_contains(&t, &d, Point2::new(0.95, 0.5)));
        assert!(ball_contains(&t, &d, Point2::new(0.86, 0.7)));
        assert!(!ball_contains(&t, &d, Point2::new(0.7, 0.5)));
        assert!(!ball_contains(&t, &d, Point2::new(0.5, 0.95)));
    }

    #[test]
    fn membership_matches_metric_on_the_seed_box() {
        let w = w_square(12);
        let c = Point2::new(0.4, 0.6);
        let d = decompose_ball(&w, c, 0.08).unwrap();
        assert!(ball_contains(&w, &d, c));
        assert!(ball_contains(&w, &d, Point2::new(0.47, 0.67)));
        assert!(!ball_contains(&w, &d, Point2::new(0.49, 0.6)));
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let w = w_square(8);
        assert!(decompose_ball(&w, Point2::new(0.5, 0.5), 0.0).is_err());
        assert!(decompose_ball(&w, Point2::new(2.0, 0.5), 0.1).is_err());
    }

    #[test]
    fn growing_radius_keeps_membership() {
        let t = torus();
        let c = Point2::new(0.2, 0.3);
        let small = decompose_ball(&t, c, 0.15).unwrap();
        let large = decompose_ball(&t, c, 0.25).unwrap();
        for k in 0..400 {
            let q = Point2::new((k % 20) as f64 / 20.0 + 0.025, (k / 20) as f64 / 20.0 + 0.025);
            if ball_contains(&t, &small, q) {
                assert!(ball_contains(&t, &large, q), "lost {q:?}");
            }
        }
    }
}
