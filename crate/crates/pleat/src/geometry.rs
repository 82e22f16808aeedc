//! Planar primitives: points, the two ambient metrics, polygons with
//! arc-length boundary parametrization, intrinsic (inside-the-polygon)
//! distances, and the flat cone metric.

use std::f64::consts::PI;
use thiserror::Error;

/// Tolerance used for geometric predicates (point on boundary, coincidence).
pub const GEOM_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("degenerate polygon `{0}`: {1}")]
    DegeneratePolygon(String, String),
    #[error("point ({0}, {1}) lies outside polygon `{2}`")]
    PointOutside(f64, f64, String),
    #[error("empty multipolygon")]
    EmptyDomain,
}

/// A point of the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }
}

/// Ambient metric on the plane. `Max` (the l-infinity metric) is the default
/// for all ball-decomposition work; `Euclidean` is available everywhere else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    #[default]
    Max,
}

impl Metric {
    pub fn dist(self, p: Point2, q: Point2) -> f64 {
        let dx = (p.x - q.x).abs();
        let dy = (p.y - q.y).abs();
        match self {
            Metric::Euclidean => dx.hypot(dy),
            Metric::Max => dx.max(dy),
        }
    }
}

/// Length of a polyline in the given metric (sum of segment lengths).
pub fn path_length(polyline: &[Point2], m: Metric) -> f64 {
    polyline.windows(2).map(|w| m.dist(w[0], w[1])).sum()
}

/// Distance on a flat cone between points at radii `t` and `s` whose angular
/// separation along the link is `dxy`: the planar law of cosines while the
/// angle is at most pi, and the path through the apex beyond that.
pub fn cone_distance(t: f64, s: f64, dxy: f64) -> f64 {
    if dxy <= PI {
        (t * t + s * s - 2.0 * t * s * dxy.cos()).max(0.0).sqrt()
    } else {
        t + s
    }
}

/// A simple closed polygon with counterclockwise orientation and an
/// arc-length parametrization of its boundary starting at vertex 0.
#[derive(Debug, Clone)]
pub struct Polygon {
    pub id: String,
    verts: Vec<Point2>,
    /// Cumulative arc length: `cum[i]` is the boundary coordinate of vertex
    /// `i`; `cum[n]` is the perimeter.
    cum: Vec<f64>,
    perimeter: f64,
    area: f64,
    convex: bool,
    axis_aligned: bool,
}

fn signed_area(verts: &[Point2]) -> f64 {
    let n = verts.len();
    let mut a = 0.0;
    for i in 0..n {
        let p = verts[i];
        let q = verts[(i + 1) % n];
        a += p.x * q.y - q.x * p.y;
    }
    a / 2.0
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

impl Polygon {
    /// Builds a polygon, normalizing clockwise input to counterclockwise.
    pub fn new(id: impl Into<String>, mut verts: Vec<Point2>) -> Result<Polygon, GeomError> {
        let id = id.into();
        if verts.len() < 3 {
            return Err(GeomError::DegeneratePolygon(id, "fewer than 3 vertices".into()));
        }
        let a = signed_area(&verts);
        if a.abs() < GEOM_EPS {
            return Err(GeomError::DegeneratePolygon(id, "zero area".into()));
        }
        if a < 0.0 {
            verts.reverse();
        }
        let n = verts.len();
        let mut cum = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for i in 0..n {
            let len = Metric::Euclidean.dist(verts[i], verts[(i + 1) % n]);
            if len < GEOM_EPS {
                return Err(GeomError::DegeneratePolygon(id, format!("zero-length edge {i}")));
            }
            acc += len;
            cum.push(acc);
        }
        let mut convex = true;
        let mut axis_aligned = true;
        for i in 0..n {
            let o = verts[i];
            let p = verts[(i + 1) % n];
            let q = verts[(i + 2) % n];
            if cross(o, p, q) < -GEOM_EPS {
                convex = false;
            }
            if (p.x - o.x).abs() > GEOM_EPS && (p.y - o.y).abs() > GEOM_EPS {
                axis_aligned = false;
            }
        }
        Ok(Polygon {
            id,
            verts,
            perimeter: acc,
            cum,
            area: a.abs(),
            convex,
            axis_aligned,
        })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.verts
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    /// True when every edge is horizontal or vertical.
    pub fn is_axis_aligned(&self) -> bool {
        self.axis_aligned
    }

    /// Arc-length coordinates of the vertices (vertex `i` is at `cum()[i]`).
    pub fn vertex_coords(&self) -> &[f64] {
        &self.cum[..self.verts.len()]
    }

    pub fn normalize_s(&self, s: f64) -> f64 {
        let mut s = s % self.perimeter;
        if s < 0.0 {
            s += self.perimeter;
        }
        s
    }

    /// Index of the edge containing boundary coordinate `s` and the offset
    /// along it.
    fn edge_at(&self, s: f64) -> (usize, f64) {
        let s = self.normalize_s(s);
        // Binary search over cumulative lengths.
        match self.cum.binary_search_by(|c| c.partial_cmp(&s).unwrap()) {
            Ok(i) => {
                if i == self.verts.len() {
                    (0, 0.0)
                } else {
                    (i, 0.0)
                }
            }
            Err(i) => (i - 1, s - self.cum[i - 1]),
        }
    }

    /// The boundary point at arc length `s` (taken modulo the perimeter).
    pub fn arc_length_point(&self, s: f64) -> Point2 {
        let (i, off) = self.edge_at(s);
        let p = self.verts[i];
        let q = self.verts[(i + 1) % self.verts.len()];
        let len = self.cum[i + 1] - self.cum[i];
        let t = off / len;
        Point2::new(p.x + (q.x - p.x) * t, p.y + (q.y - p.y) * t)
    }

    /// Unit tangent of the edge under boundary coordinate `s` (at vertices,
    /// the outgoing edge).
    pub fn tangent_at(&self, s: f64) -> Point2 {
        let (i, _) = self.edge_at(s);
        let p = self.verts[i];
        let q = self.verts[(i + 1) % self.verts.len()];
        let len = self.cum[i + 1] - self.cum[i];
        Point2::new((q.x - p.x) / len, (q.y - p.y) / len)
    }

    /// Inward unit normal at boundary coordinate `s` (left of the tangent,
    /// since the boundary is counterclockwise).
    pub fn inward_normal_at(&self, s: f64) -> Point2 {
        let t = self.tangent_at(s);
        Point2::new(-t.y, t.x)
    }

    /// Interior angle at the point with boundary coordinate `s`: the actual
    /// vertex angle when `s` is a vertex, and pi on an edge interior.
    pub fn interior_angle_at(&self, s: f64) -> f64 {
        let s = self.normalize_s(s);
        let n = self.verts.len();
        for i in 0..n {
            if (s - self.cum[i]).abs() < GEOM_EPS
                || (i == 0 && (s - self.perimeter).abs() < GEOM_EPS)
            {
                let prev = self.verts[(i + n - 1) % n];
                let v = self.verts[i];
                let next = self.verts[(i + 1) % n];
                let a1 = (prev.y - v.y).atan2(prev.x - v.x);
                let a2 = (next.y - v.y).atan2(next.x - v.x);
                let mut ang = a1 - a2;
                while ang < 0.0 {
                    ang += 2.0 * PI;
                }
                while ang >= 2.0 * PI {
                    ang -= 2.0 * PI;
                }
                return ang;
            }
        }
        PI
    }

    /// Whether `s` lies (within tolerance) on a vertex of the polygon.
    pub fn is_vertex_coord(&self, s: f64) -> bool {
        let s = self.normalize_s(s);
        self.cum[..self.verts.len()]
            .iter()
            .any(|&c| (s - c).abs() < GEOM_EPS)
            || (s - self.perimeter).abs() < GEOM_EPS
    }

    /// Distance from `p` to the boundary (Euclidean).
    pub fn boundary_distance(&self, p: Point2) -> f64 {
        let n = self.verts.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            best = best.min(point_segment_distance(p, self.verts[i], self.verts[(i + 1) % n]));
        }
        best
    }

    /// Boundary coordinate of `p` when `p` lies on the boundary (within
    /// `tol`); `None` otherwise.
    pub fn boundary_coord(&self, p: Point2, tol: f64) -> Option<f64> {
        let n = self.verts.len();
        for i in 0..n {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % n];
            if point_segment_distance(p, a, b) <= tol {
                let len = self.cum[i + 1] - self.cum[i];
                let t = ((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / (len * len);
                let t = t.clamp(0.0, 1.0);
                return Some(self.normalize_s(self.cum[i] + t * len));
            }
        }
        None
    }

    /// Even-odd point-in-polygon test; boundary points count as inside.
    pub fn contains(&self, p: Point2) -> bool {
        if self.boundary_distance(p) <= 1e-12 {
            return true;
        }
        let n = self.verts.len();
        let mut inside = false;
        for i in 0..n {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % n];
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bbox(&self) -> (Point2, Point2) {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.verts {
            lo.x = lo.x.min(v.x);
            lo.y = lo.y.min(v.y);
            hi.x = hi.x.max(v.x);
            hi.y = hi.y.max(v.y);
        }
        (lo, hi)
    }

    /// True when the open segment `pq` stays inside the polygon (both
    /// endpoints must already lie inside or on the boundary).
    pub fn segment_inside(&self, p: Point2, q: Point2) -> bool {
        let n = self.verts.len();
        for i in 0..n {
            if segments_properly_cross(p, q, self.verts[i], self.verts[(i + 1) % n]) {
                return false;
            }
        }
        // Proper crossings can be absent while the segment still leaves the
        // polygon through a vertex; interior samples catch that.
        for k in 1..16 {
            let t = k as f64 / 16.0;
            let m = Point2::new(p.x + (q.x - p.x) * t, p.y + (q.y - p.y) * t);
            if !self.contains(m) {
                return false;
            }
        }
        true
    }

    /// Length of the shortest polyline from `p` to `q` inside the polygon,
    /// measured in metric `m`. Straight visibility segments are selected with
    /// the Euclidean notion of "inside" and then re-measured in `m`.
    pub fn intrinsic_distance(&self, p: Point2, q: Point2, m: Metric) -> Result<f64, GeomError> {
        Ok(self.intrinsic_path(p, q, m)?.1)
    }

    /// Shortest polyline and its length; see [`Polygon::intrinsic_distance`].
    pub fn intrinsic_path(
        &self,
        p: Point2,
        q: Point2,
        m: Metric,
    ) -> Result<(Vec<Point2>, f64), GeomError> {
        for pt in [p, q] {
            if !self.contains(pt) {
                return Err(GeomError::PointOutside(pt.x, pt.y, self.id.clone()));
            }
        }
        if self.convex || self.segment_inside(p, q) {
            return Ok((vec![p, q], m.dist(p, q)));
        }
        // Visibility graph over p, q, and the polygon vertices.
        let mut nodes = vec![p, q];
        nodes.extend_from_slice(&self.verts);
        let n = nodes.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![usize::MAX; n];
        let mut done = vec![false; n];
        dist[0] = 0.0;
        loop {
            let mut u = usize::MAX;
            let mut best = f64::INFINITY;
            for i in 0..n {
                if !done[i] && dist[i] < best {
                    best = dist[i];
                    u = i;
                }
            }
            if u == usize::MAX || u == 1 {
                break;
            }
            done[u] = true;
            for v in 0..n {
                if done[v] {
                    continue;
                }
                if self.segment_inside(nodes[u], nodes[v]) {
                    let nd = dist[u] + m.dist(nodes[u], nodes[v]);
                    if nd < dist[v] {
                        dist[v] = nd;
                        prev[v] = u;
                    }
                }
            }
        }
        let mut path = vec![];
        let mut cur = 1;
        while cur != usize::MAX {
            path.push(nodes[cur]);
            cur = prev[cur];
        }
        path.reverse();
        Ok((path, dist[1]))
    }
}

/// Euclidean distance from point `p` to segment `ab`.
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let abx = b.x - a.x;
    let aby = b.y - a.y;
    let len2 = abx * abx + aby * aby;
    if len2 == 0.0 {
        return Metric::Euclidean.dist(p, a);
    }
    let t = (((p.x - a.x) * abx + (p.y - a.y) * aby) / len2).clamp(0.0, 1.0);
    Metric::Euclidean.dist(p, Point2::new(a.x + t * abx, a.y + t * aby))
}

/// True when segments `ab` and `cd` cross at interior points of both.
fn segments_properly_cross(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    let eps = 1e-12;
    (d1 > eps && d2 < -eps || d1 < -eps && d2 > eps)
        && (d3 > eps && d4 < -eps || d3 < -eps && d4 > eps)
}

/// A disjoint collection of polygons with its derived scale constants.
#[derive(Debug, Clone)]
pub struct MultiPolygon {
    pub polygons: Vec<Polygon>,
}

impl MultiPolygon {
    pub fn new(polygons: Vec<Polygon>) -> Result<MultiPolygon, GeomError> {
        if polygons.is_empty() {
            return Err(GeomError::EmptyDomain);
        }
        Ok(MultiPolygon { polygons })
    }

    pub fn total_area(&self) -> f64 {
        self.polygons.iter().map(|p| p.area()).sum()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.polygons.iter().position(|p| p.id == id)
    }

    /// Diameter of the vertex set in metric `m` (attained at vertices for
    /// both supported metrics).
    pub fn diam(&self, m: Metric) -> f64 {
        let verts: Vec<Point2> = self
            .polygons
            .iter()
            .flat_map(|p| p.vertices().iter().copied())
            .collect();
        let mut best: f64 = 0.0;
        for i in 0..verts.len() {
            for j in i + 1..verts.len() {
                best = best.max(m.dist(verts[i], verts[j]));
            }
        }
        best
    }

    /// Smallest distance between non-adjacent sides (and between sides of
    /// distinct polygons), measured in metric `m` via dense endpoint and
    /// projection candidates.
    pub fn d_min(&self, m: Metric) -> f64 {
        let mut best = f64::INFINITY;
        let mut sides: Vec<(usize, Point2, Point2)> = vec![];
        for (pi, poly) in self.polygons.iter().enumerate() {
            let n = poly.vertices().len();
            for i in 0..n {
                sides.push((pi, poly.vertices()[i], poly.vertices()[(i + 1) % n]));
            }
        }
        for i in 0..sides.len() {
            for j in i + 1..sides.len() {
                let (pi, a1, b1) = sides[i];
                let (pj, a2, b2) = sides[j];
                if pi == pj {
                    // Adjacent sides (sharing an endpoint) are excluded.
                    let shares = [a1, b1]
                        .iter()
                        .any(|p| [a2, b2].iter().any(|q| Metric::Euclidean.dist(*p, *q) < GEOM_EPS));
                    if shares {
                        continue;
                    }
                }
                best = best.min(segment_segment_distance(a1, b1, a2, b2, m));
            }
        }
        best
    }

    /// Index of a polygon containing `p` (boundary included).
    pub fn polygon_containing(&self, p: Point2) -> Option<usize> {
        self.polygons.iter().position(|poly| poly.contains(p))
    }
}

/// Distance between two segments in metric `m`, via mutual closest-point
/// candidates (exact for non-crossing segments under the Euclidean metric and
/// for axis-parallel segments under the max metric).
pub fn segment_segment_distance(a1: Point2, b1: Point2, a2: Point2, b2: Point2, m: Metric) -> f64 {
    if segments_properly_cross(a1, b1, a2, b2) {
        return 0.0;
    }
    let proj = |p: Point2, a: Point2, b: Point2| -> Point2 {
        let abx = b.x - a.x;
        let aby = b.y - a.y;
        let len2 = abx * abx + aby * aby;
        let t = (((p.x - a.x) * abx + (p.y - a.y) * aby) / len2).clamp(0.0, 1.0);
        Point2::new(a.x + t * abx, a.y + t * aby)
    };
    let mut best = f64::INFINITY;
    for p in [a1, b1] {
        best = best.min(m.dist(p, proj(p, a2, b2)));
    }
    for p in [a2, b2] {
        best = best.min(m.dist(p, proj(p, a1, b1)));
    }
    best
}
