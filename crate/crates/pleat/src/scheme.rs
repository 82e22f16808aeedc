//! Pairing schemes: segment pairings, alternating-sequence ("type W")
//! generators, consecutive fold chains, validity checks (fullness, disjoint
//! interiors, unlinkedness), the point-identification map, point
//! classification, and cone angles.

use crate::geometry::{GeomError, MultiPolygon, GEOM_EPS};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error("invalid pairing: {0}")]
    InvalidPairing(String),
    #[error("invalid sequence spec: {0}")]
    InvalidSequence(String),
    #[error("pairing interiors overlap on polygon {poly} near arc length {at}")]
    Overlap { poly: usize, at: f64 },
    #[error("point is not on the boundary of any polygon")]
    NotOnBoundary,
    #[error("split parameter must be strictly interior to the pairing")]
    SplitAtEndpoint,
    #[error("cannot merge boundaries: {0}")]
    Merge(String),
}

/// A point on the boundary of one polygon of the domain, by arc length from
/// vertex 0 in the positive (counterclockwise) direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub poly: usize,
    pub s: f64,
}

/// An orientation-reversing, length-preserving identification of two
/// equal-length boundary segments: coordinate `a_start + t` is glued to
/// `b_start + (len - t)` for `t` in `[0, len]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentPairing {
    pub a_poly: usize,
    pub a_start: f64,
    pub b_poly: usize,
    pub b_start: f64,
    pub len: f64,
}

impl SegmentPairing {
    /// All partner coordinates of `(poly, s)` under this single pairing.
    /// A point can lie in both segments (folds share an endpoint), so up to
    /// two partners are returned.
    pub fn partners(
        &self,
        poly: usize,
        s: f64,
        perim: f64,
        tol: f64,
    ) -> impl Iterator<Item = BoundaryPoint> {
        let mut out: [Option<BoundaryPoint>; 2] = [None, None];
        let wrap = |x: f64| {
            let mut x = x % perim;
            if x < 0.0 {
                x += perim;
            }
            x
        };
        if poly == self.a_poly {
            let t = wrap(s - self.a_start);
            let t = if t > perim - tol { 0.0 } else { t };
            if t <= self.len + tol {
                out[0] = Some(BoundaryPoint {
                    poly: self.b_poly,
                    s: wrap(self.b_start + (self.len - t.min(self.len))),
                });
            }
        }
        if poly == self.b_poly {
            let u = wrap(s - self.b_start);
            let u = if u > perim - tol { 0.0 } else { u };
            if u <= self.len + tol {
                out[1] = Some(BoundaryPoint {
                    poly: self.a_poly,
                    s: wrap(self.a_start + (self.len - u.min(self.len))),
                });
            }
        }
        out.into_iter().flatten()
    }
}

/// A sequence of positive lengths, either an explicit finite list or an
/// infinite decreasing geometric sequence `first / ratio^i` with `ratio > 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum SeqSpec {
    List(Vec<f64>),
    Geometric { first: f64, ratio: f64 },
}

impl SeqSpec {
    pub fn zero() -> SeqSpec {
        SeqSpec::List(vec![])
    }

    pub fn validate(&self) -> Result<(), SchemeError> {
        match self {
            SeqSpec::List(v) => {
                if v.iter().any(|&x| x < 0.0 || !x.is_finite()) {
                    return Err(SchemeError::InvalidSequence("negative or non-finite term".into()));
                }
            }
            SeqSpec::Geometric { first, ratio } => {
                if *first < 0.0 || !first.is_finite() {
                    return Err(SchemeError::InvalidSequence("negative first term".into()));
                }
                if *ratio <= 1.0 || !ratio.is_finite() {
                    return Err(SchemeError::InvalidSequence(
                        "geometric ratio must exceed 1".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn term(&self, i: usize) -> f64 {
        match self {
            SeqSpec::List(v) => v.get(i).copied().unwrap_or(0.0),
            SeqSpec::Geometric { first, ratio } => first / ratio.powi(i as i32),
        }
    }

    /// Number of terms for finite specs; `None` for infinite ones.
    pub fn count(&self) -> Option<usize> {
        match self {
            SeqSpec::List(v) => Some(v.len()),
            SeqSpec::Geometric { first, .. } => {
                if *first == 0.0 {
                    Some(0)
                } else {
                    None
                }
            }
        }
    }

    /// Closed-form total sum.
    pub fn total(&self) -> f64 {
        match self {
            SeqSpec::List(v) => v.iter().sum(),
            SeqSpec::Geometric { first, ratio } => first * ratio / (ratio - 1.0),
        }
    }

    /// Closed-form tail sum of all terms with index `>= n`.
    pub fn tail(&self, n: usize) -> f64 {
        match self {
            SeqSpec::List(v) => v.iter().skip(n).sum(),
            SeqSpec::Geometric { first, ratio } => {
                first / ratio.powi(n as i32) * ratio / (ratio - 1.0)
            }
        }
    }

    /// Partial sum of terms with index `< n`.
    pub fn partial(&self, n: usize) -> f64 {
        self.total() - self.tail(n)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SeqSpec::List(v) => v.iter().all(|&x| x == 0.0),
            SeqSpec::Geometric { first, .. } => *first == 0.0,
        }
    }
}

/// Alternating identification of one side of a polygon: the side of length
/// `L` is covered from its start by `alpha_0, beta_0, beta_0', alpha_1, ...`
/// and from its end, backwards, by `alpha_0', alpha_1', ...`, with
/// `sum(a) + sum(b) = L/2`. Infinite sequences accumulate at
/// `side_start + L - sum(a)` and are expanded to `depth` terms, with the
/// remaining tail accounted for in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeWSpec {
    pub poly: usize,
    pub side_start: f64,
    pub side_len: f64,
    pub a: SeqSpec,
    pub b: SeqSpec,
    pub depth: usize,
}

/// Outcome of expanding a generator: the concrete pairings plus the length
/// of boundary left uncovered by the truncation (zero for finite specs).
#[derive(Debug, Clone)]
pub struct Expansion {
    pub pairings: Vec<SegmentPairing>,
    pub uncovered_len: f64,
    /// Total pairing length contributed by the unexpanded tail.
    pub tail_pairing_len: f64,
    pub accumulation: Option<BoundaryPoint>,
}

impl TypeWSpec {
    pub fn is_infinite(&self) -> bool {
        self.a.count().is_none() || self.b.count().is_none()
    }

    /// Arc-length coordinate of the accumulation point for infinite specs.
    pub fn accumulation_coord(&self) -> f64 {
        self.side_start + self.side_len - self.a.total()
    }

    pub fn expand(&self) -> Result<Expansion, SchemeError> {
        self.a.validate()?;
        self.b.validate()?;
        let l = self.side_len;
        let half = self.a.total() + self.b.total();
        if (half - l / 2.0).abs() > 1e-9 {
            return Err(SchemeError::InvalidSequence(format!(
                "sequence sums {half} do not equal half the side length {}",
                l / 2.0
            )));
        }
        let infinite = self.is_infinite();
        let n = match self.a.count() {
            Some(c) => c.max(self.b.count().unwrap_or(0)),
            None => self.depth.max(1),
        };
        let accum = self.accumulation_coord();
        let mut pairings = vec![];
        let mut a_pos = self.side_start; // A_i
        for i in 0..n {
            let ai = self.a.term(i);
            let bi = self.b.term(i);
            // Down-the-side coverage must stay short of the up-the-side part.
            let up_limit = self.side_start + l - self.a.partial(i + 1);
            if a_pos + ai + 2.0 * bi > up_limit.min(accum.max(up_limit)) + 1e-9
                || a_pos + ai + 2.0 * bi > self.side_start + l + 1e-9
            {
                return Err(SchemeError::InvalidSequence(format!(
                    "term {i} exceeds the side (position {})",
                    a_pos + ai + 2.0 * bi
                )));
            }
            if ai > 0.0 {
                // <alpha_i, alpha_i'>, with alpha_i' located from the far end.
                pairings.push(SegmentPairing {
                    a_poly: self.poly,
                    a_start: a_pos,
                    b_poly: self.poly,
                    b_start: self.side_start + l - self.a.partial(i + 1),
                    len: ai,
                });
            }
            if bi > 0.0 {
                // <beta_i, beta_i'>: a fold sharing its midpoint coordinate.
                pairings.push(SegmentPairing {
                    a_poly: self.poly,
                    a_start: a_pos + ai,
                    b_poly: self.poly,
                    b_start: a_pos + ai + bi,
                    len: bi,
                });
            }
            a_pos += ai + 2.0 * bi;
        }
        let (uncovered, tail_len) = if infinite {
            let ta = self.a.tail(n);
            let tb = self.b.tail(n);
            (2.0 * ta + 2.0 * tb, ta + tb)
        } else {
            (0.0, 0.0)
        };
        Ok(Expansion {
            pairings,
            uncovered_len: uncovered,
            tail_pairing_len: tail_len,
            accumulation: if infinite {
                Some(BoundaryPoint {
                    poly: self.poly,
                    s: accum,
                })
            } else {
                None
            },
        })
    }

    /// Total pairing length (closed form, tails included).
    pub fn pairing_len(&self) -> f64 {
        self.a.total() + self.b.total()
    }
}

/// A run of consecutive folds along the boundary: fold `i` occupies an
/// interval of length `2 * lens[i]` immediately after (or, when `reverse`,
/// before) fold `i - 1`, creased at its own midpoint. Infinite runs
/// accumulate at `start ± 2 * sum(lens)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldChainSpec {
    pub poly: usize,
    pub start: f64,
    pub lens: SeqSpec,
    pub depth: usize,
    pub reverse: bool,
}

impl FoldChainSpec {
    pub fn is_infinite(&self) -> bool {
        self.lens.count().is_none()
    }

    pub fn accumulation_coord(&self) -> f64 {
        if self.reverse {
            self.start - 2.0 * self.lens.total()
        } else {
            self.start + 2.0 * self.lens.total()
        }
    }

    pub fn expand(&self, perim: f64) -> Result<Expansion, SchemeError> {
        self.lens.validate()?;
        let infinite = self.is_infinite();
        let n = self.lens.count().unwrap_or(self.depth.max(1));
        let mut pairings = vec![];
        let mut c = self.start;
        let wrap = |x: f64| {
            let mut x = x % perim;
            if x < 0.0 {
                x += perim;
            }
            x
        };
        for i in 0..n {
            let li = self.lens.term(i);
            if li <= 0.0 {
                continue;
            }
            let a_start = if self.reverse { c - 2.0 * li } else { c };
            pairings.push(SegmentPairing {
                a_poly: self.poly,
                a_start: wrap(a_start),
                b_poly: self.poly,
                b_start: wrap(a_start + li),
                len: li,
            });
            c += if self.reverse { -2.0 * li } else { 2.0 * li };
        }
        let tail = self.lens.tail(n);
        Ok(Expansion {
            pairings,
            uncovered_len: if infinite { 2.0 * tail } else { 0.0 },
            tail_pairing_len: if infinite { tail } else { 0.0 },
            accumulation: if infinite {
                Some(BoundaryPoint {
                    poly: self.poly,
                    s: wrap(self.accumulation_coord()),
                })
            } else {
                None
            },
        })
    }

    pub fn pairing_len(&self) -> f64 {
        self.lens.total()
    }
}

/// Classification of a quotient point on the image of the boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum PointKind {
    /// Exactly two non-vertex preimages, away from any accumulation: the
    /// quotient is locally Euclidean there.
    Planar,
    /// Regular vertex with the given valence (number of preimages).
    RegularVertex(usize),
    /// Accumulation point of vertices.
    SingularAccumulation,
    /// Infinite identification class.
    SingularInfiniteVertex,
}

/// The full identification class of a boundary point.
#[derive(Debug, Clone)]
pub struct PointClass {
    pub representative: BoundaryPoint,
    /// Class members, enumerated up to the chain cap for singular classes.
    pub members: Vec<BoundaryPoint>,
    /// True when enumeration was cut off (the class is infinite).
    pub truncated: bool,
    pub kind: PointKind,
    /// Sum of interior angles over the members; absent for singular points.
    pub cone_angle: Option<f64>,
}

/// Fullness report: a scheme is full when its total pairing length equals
/// half the total boundary length.
#[derive(Debug, Clone)]
pub struct FullnessReport {
    pub total_pairing_len: f64,
    pub boundary_len: f64,
    pub ok: bool,
}

/// Linking report. `plain` requires a single effective boundary circle, a
/// full scheme, and no two sampled pairs in alternating cyclic position.
#[derive(Debug, Clone)]
pub struct UnlinkReport {
    pub plain: bool,
    /// Indices into the expanded pairing list witnessing a linked pair.
    pub witness: Option<(usize, usize)>,
    pub reason: String,
}

/// A full interior-disjoint collection of segment pairings over a
/// multipolygon, with infinite generators kept symbolically and expanded to
/// finite depth.
#[derive(Debug, Clone)]
pub struct PairingScheme {
    pub domain: MultiPolygon,
    pub basic: Vec<SegmentPairing>,
    pub w_specs: Vec<TypeWSpec>,
    pub chains: Vec<FoldChainSpec>,
    /// All concrete pairings: `basic` plus the expanded generators.
    pub expanded: Vec<SegmentPairing>,
    /// Accumulation coordinates of the infinite generators.
    pub singular_points: Vec<BoundaryPoint>,
    /// Pairing length represented only symbolically (unexpanded tails).
    pub tail_pairing_len: f64,
    /// Boundary length left uncovered by the truncation.
    pub uncovered_len: f64,
}

impl PairingScheme {
    pub fn build(
        domain: MultiPolygon,
        basic: Vec<SegmentPairing>,
        w_specs: Vec<TypeWSpec>,
        chains: Vec<FoldChainSpec>,
    ) -> Result<PairingScheme, SchemeError> {
        let mut expanded = basic.clone();
        let mut singular_points = vec![];
        let mut tail_pairing_len = 0.0;
        let mut uncovered_len = 0.0;
        for w in &w_specs {
            let e = w.expand()?;
            expanded.extend(e.pairings);
            singular_points.extend(e.accumulation);
            tail_pairing_len += e.tail_pairing_len;
            uncovered_len += e.uncovered_len;
        }
        for c in &chains {
            let perim = domain
                .polygons
                .get(c.poly)
                .ok_or_else(|| SchemeError::InvalidPairing(format!("no polygon {}", c.poly)))?
                .perimeter();
            let e = c.expand(perim)?;
            expanded.extend(e.pairings);
            singular_points.extend(e.accumulation);
            tail_pairing_len += e.tail_pairing_len;
            uncovered_len += e.uncovered_len;
        }
        let scheme = PairingScheme {
            domain,
            basic,
            w_specs,
            chains,
            expanded,
            singular_points,
            tail_pairing_len,
            uncovered_len,
        };
        scheme.validate()?;
        Ok(scheme)
    }

    fn validate(&self) -> Result<(), SchemeError> {
        // Each segment must fit in its polygon's boundary and all segment
        // interiors must be pairwise disjoint.
        let mut per_poly: Vec<Vec<(f64, f64)>> = vec![vec![]; self.domain.polygons.len()];
        for p in &self.expanded {
            for (poly, start) in [(p.a_poly, p.a_start), (p.b_poly, p.b_start)] {
                let perim = self
                    .domain
                    .polygons
                    .get(poly)
                    .ok_or_else(|| SchemeError::InvalidPairing(format!("no polygon {poly}")))?
                    .perimeter();
                if p.len <= 0.0 || p.len > perim / 2.0 + 1e-9 {
                    return Err(SchemeError::InvalidPairing(format!(
                        "segment length {} out of range for polygon {poly}",
                        p.len
                    )));
                }
                let s0 = self.domain.polygons[poly].normalize_s(start);
                let s1 = s0 + p.len;
                if s1 <= perim + 1e-9 {
                    per_poly[poly].push((s0, s1.min(perim)));
                } else {
                    // Wrapping segment: split at the parametrization origin.
                    per_poly[poly].push((s0, perim));
                    per_poly[poly].push((0.0, s1 - perim));
                }
            }
        }
        for (poly, ivs) in per_poly.iter_mut().enumerate() {
            ivs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            for w in ivs.windows(2) {
                if w[0].1 > w[1].0 + 1e-9 {
                    return Err(SchemeError::Overlap {
                        poly,
                        at: w[1].0,
                    });
                }
            }
        }
        Ok(())
    }

    /// Total boundary length of the domain.
    pub fn boundary_len(&self) -> f64 {
        self.domain.polygons.iter().map(|p| p.perimeter()).sum()
    }

    /// Fullness check (tails counted in closed form).
    pub fn check_full(&self) -> FullnessReport {
        let total: f64 =
            self.expanded.iter().map(|p| p.len).sum::<f64>() + self.tail_pairing_len;
        let boundary = self.boundary_len();
        FullnessReport {
            total_pairing_len: total,
            boundary_len: boundary,
            ok: (total - boundary / 2.0).abs() < 1e-9,
        }
    }

    /// All partner coordinates of `p` across every concrete pairing.
    fn partners_of(&self, p: BoundaryPoint, tol: f64) -> Vec<BoundaryPoint> {
        let perim = self.domain.polygons[p.poly].perimeter();
        let mut out = vec![];
        for pairing in &self.expanded {
            for q in pairing.partners(p.poly, p.s, perim, tol) {
                out.push(q);
            }
        }
        out
    }

    fn near(&self, a: BoundaryPoint, b: BoundaryPoint, tol: f64) -> bool {
        if a.poly != b.poly {
            return false;
        }
        let perim = self.domain.polygons[a.poly].perimeter();
        let d = (a.s - b.s).abs();
        d < tol || (perim - d) < tol
    }

    /// True when `p` coincides with the accumulation coordinate of an
    /// infinite generator.
    pub fn is_singular_point(&self, p: BoundaryPoint) -> bool {
        self.singular_points.iter().any(|&q| self.near(p, q, GEOM_EPS))
    }

    /// The identification class of `p` under the transitive closure of all
    /// pairings. Chain length is capped at `10 * expanded pairings` to
    /// guarantee termination; hitting the cap marks the class truncated.
    pub fn identify(&self, p: BoundaryPoint) -> (Vec<BoundaryPoint>, bool) {
        let cap = 10 * self.expanded.len().max(1);
        let tol = GEOM_EPS;
        let p = BoundaryPoint {
            poly: p.poly,
            s: self.domain.polygons[p.poly].normalize_s(p.s),
        };
        let mut members = vec![p];
        let mut queue = vec![p];
        let mut truncated = false;
        while let Some(cur) = queue.pop() {
            for q in self.partners_of(cur, tol) {
                if !members.iter().any(|&m| self.near(m, q, tol)) {
                    if members.len() >= cap {
                        truncated = true;
                        queue.clear();
                        break;
                    }
                    members.push(q);
                    queue.push(q);
                }
            }
        }
        (members, truncated)
    }

    /// Classifies the quotient point under `p`; see [`PointKind`].
    pub fn classify_point(&self, p: BoundaryPoint) -> PointClass {
        let (members, truncated) = self.identify(p);
        let accum = members.iter().any(|&m| self.is_singular_point(m));
        let kind = if accum {
            PointKind::SingularAccumulation
        } else if truncated {
            PointKind::SingularInfiniteVertex
        } else {
            let has_vertex = members
                .iter()
                .any(|m| self.domain.polygons[m.poly].is_vertex_coord(m.s));
            if members.len() == 2 && !has_vertex {
                PointKind::Planar
            } else {
                PointKind::RegularVertex(members.len())
            }
        };
        let cone_angle = match kind {
            PointKind::SingularAccumulation | PointKind::SingularInfiniteVertex => None,
            _ => Some(
                members
                    .iter()
                    .map(|m| self.domain.polygons[m.poly].interior_angle_at(m.s))
                    .sum::<f64>(),
            ),
        };
        PointClass {
            representative: p,
            members,
            truncated,
            kind,
            cone_angle,
        }
    }

    /// Splits the `idx`-th concrete pairing at parameter `t` (strictly inside
    /// `(0, len)`), producing a scheme inducing the same identification.
    /// Generators of the result are fully materialized.
    pub fn split_pairing(&self, idx: usize, t: f64) -> Result<PairingScheme, SchemeError> {
        let p = *self
            .expanded
            .get(idx)
            .ok_or_else(|| SchemeError::InvalidPairing(format!("no pairing {idx}")))?;
        if t <= GEOM_EPS || t >= p.len - GEOM_EPS {
            return Err(SchemeError::SplitAtEndpoint);
        }
        let mut basic = self.expanded.clone();
        basic[idx] = SegmentPairing {
            a_poly: p.a_poly,
            a_start: p.a_start,
            b_poly: p.b_poly,
            b_start: p.b_start + (p.len - t),
            len: t,
        };
        basic.push(SegmentPairing {
            a_poly: p.a_poly,
            a_start: p.a_start + t,
            b_poly: p.b_poly,
            b_start: p.b_start,
            len: p.len - t,
        });
        let mut out = PairingScheme {
            domain: self.domain.clone(),
            basic,
            w_specs: vec![],
            chains: vec![],
            expanded: vec![],
            singular_points: self.singular_points.clone(),
            tail_pairing_len: self.tail_pairing_len,
            uncovered_len: self.uncovered_len,
        };
        out.expanded = out.basic.clone();
        out.validate()?;
        Ok(out)
    }

    /// Default sample spacing for discretized computations: the coarse scale
    /// of the scheme (smallest polygon feature or leading pairing length)
    /// divided by 50. Deeply-truncated tails do not drive `h` to zero; tiny
    /// tail pairings are still sampled at their own endpoints.
    pub fn default_h(&self) -> f64 {
        let mut scale = self.domain.d_min(crate::geometry::Metric::Euclidean);
        for p in &self.basic {
            scale = scale.min(p.len);
        }
        for w in &self.w_specs {
            if w.a.term(0) > 0.0 {
                scale = scale.min(w.a.term(0));
            }
            if w.b.term(0) > 0.0 {
                scale = scale.min(w.b.term(0));
            }
        }
        for c in &self.chains {
            if c.lens.term(0) > 0.0 {
                scale = scale.min(c.lens.term(0));
            }
        }
        scale / 50.0
    }

    /// Unlinkedness / plainness check. With `merge`, multipolygon domains
    /// glued along whole segments by inter-polygon pairings are first merged
    /// into one effective boundary circle by walking the glued boundary.
    pub fn check_unlinked(&self, merge: bool) -> UnlinkReport {
        if !self.check_full().ok {
            return UnlinkReport {
                plain: false,
                witness: None,
                reason: "scheme is not full".into(),
            };
        }
        let multi = self.domain.polygons.len() > 1;
        if multi && !merge {
            return UnlinkReport {
                plain: false,
                witness: None,
                reason: "multipolygon domain (merge not requested)".into(),
            };
        }
        let (to_circle, circle_len, glue): (Box<dyn Fn(usize, f64) -> Option<f64>>, f64, Vec<bool>) =
            if multi {
                match self.merged_boundary() {
                    Ok(mb) => {
                        let glue = self
                            .expanded
                            .iter()
                            .map(|p| p.a_poly != p.b_poly)
                            .collect();
                        let total = mb.total;
                        (
                            Box::new(move |poly, s| mb.to_merged(poly, s)),
                            total,
                            glue,
                        )
                    }
                    Err(e) => {
                        return UnlinkReport {
                            plain: false,
                            witness: None,
                            reason: format!("merge failed: {e}"),
                        }
                    }
                }
            } else {
                let perim = self.domain.polygons[0].perimeter();
                (
                    Box::new(move |_poly, s| Some(s)),
                    perim,
                    vec![false; self.expanded.len()],
                )
            };
        // Sampled related pairs per pairing: both endpoint pairs plus the
        // midpoint pair, in circle coordinates.
        let mut pairs: Vec<(usize, f64, f64)> = vec![];
        for (i, p) in self.expanded.iter().enumerate() {
            if glue[i] {
                continue; // glue pairings vanish inside the merged circle
            }
            for t in [0.0, p.len / 2.0, p.len] {
                let a = self.domain.polygons[p.a_poly].normalize_s(p.a_start + t);
                let b = self.domain.polygons[p.b_poly].normalize_s(p.b_start + (p.len - t));
                match (to_circle(p.a_poly, a), to_circle(p.b_poly, b)) {
                    (Some(x), Some(y)) => pairs.push((i, x, y)),
                    _ => {
                        return UnlinkReport {
                            plain: false,
                            witness: None,
                            reason: format!("pairing {i} crosses a glued segment"),
                        }
                    }
                }
            }
        }
        let tol = 1e-9;
        let inside = |lo: f64, hi: f64, x: f64| {
            // Strictly inside the positively-oriented arc from lo to hi.
            let span = (hi - lo).rem_euclid(circle_len);
            let off = (x - lo).rem_euclid(circle_len);
            off > tol && off < span - tol
        };
        for i in 0..pairs.len() {
            for j in i + 1..pairs.len() {
                let (pi, x1, x2) = pairs[i];
                let (pj, y1, y2) = pairs[j];
                if pi == pj {
                    continue;
                }
                // Pairs sharing a point (within tolerance) count as unlinked.
                let close = |a: f64, b: f64| {
                    let d = (a - b).abs();
                    d < tol || circle_len - d < tol
                };
                if close(x1, y1) || close(x1, y2) || close(x2, y1) || close(x2, y2) {
                    continue;
                }
                let in1 = inside(x1, x2, y1);
                let in2 = inside(x1, x2, y2);
                if in1 != in2 {
                    return UnlinkReport {
                        plain: false,
                        witness: Some((pi, pj)),
                        reason: format!("pairings {pi} and {pj} alternate around the boundary"),
                    };
                }
            }
        }
        UnlinkReport {
            plain: true,
            witness: None,
            reason: "full and unlinked".into(),
        }
    }

    /// Walks the boundary of the complex obtained by erasing inter-polygon
    /// glue pairings, producing one merged boundary circle.
    pub fn merged_boundary(&self) -> Result<MergedBoundary, SchemeError> {
        let nps = self.domain.polygons.len();
        // Glue intervals per polygon: (start, end, pairing index, is_a_side).
        let mut glue: Vec<Vec<(f64, f64, usize, bool)>> = vec![vec![]; nps];
        for (i, p) in self.expanded.iter().enumerate() {
            if p.a_poly == p.b_poly {
                continue;
            }
            for (poly, start, is_a) in [(p.a_poly, p.a_start, true), (p.b_poly, p.b_start, false)] {
                let perim = self.domain.polygons[poly].perimeter();
                let s0 = self.domain.polygons[poly].normalize_s(start);
                if s0 + p.len > perim + 1e-9 {
                    return Err(SchemeError::Merge(
                        "glued segment wraps the parametrization origin".into(),
                    ));
                }
                glue[poly].push((s0, s0 + p.len, i, is_a));
            }
        }
        if glue.iter().all(|g| g.is_empty()) {
            return Err(SchemeError::Merge("no inter-polygon pairings".into()));
        }
        for g in glue.iter_mut() {
            g.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        }
        // Complementary (free) arcs per polygon, stored as (start, length).
        let mut free_arcs: Vec<Vec<(f64, f64)>> = vec![vec![]; nps];
        for (poly, g) in glue.iter().enumerate() {
            let perim = self.domain.polygons[poly].perimeter();
            if g.is_empty() {
                return Err(SchemeError::Merge(format!(
                    "polygon {poly} is not glued to the rest"
                )));
            }
            for k in 0..g.len() {
                let end = g[k].1;
                let next = if k + 1 < g.len() { g[k + 1].0 } else { g[0].0 + perim };
                if next - end > 1e-9 {
                    free_arcs[poly].push((end % perim, next - end));
                }
            }
        }
        // Walk: start at the first free arc anywhere.
        let (start_poly, &(start_s, _)) = free_arcs
            .iter()
            .enumerate()
            .find_map(|(i, a)| a.first().map(|f| (i, f)))
            .ok_or_else(|| SchemeError::Merge("boundary is entirely glued".into()))?;
        let mut intervals: Vec<MergedInterval> = vec![];
        let mut offset = 0.0;
        let mut cur = (start_poly, start_s);
        let cap = 4 * (self.expanded.len() + free_arcs.iter().map(|a| a.len()).sum::<usize>()) + 8;
        for _ in 0..cap {
            let (poly, s) = cur;
            let perim = self.domain.polygons[poly].perimeter();
            // Free arc starting here?
            let near_cyclic = |a: f64, b: f64| {
                let d = (a - b).rem_euclid(perim);
                d < 1e-9 || perim - d < 1e-9
            };
            if let Some(&(fs, flen)) = free_arcs[poly].iter().find(|&&(fs, _)| near_cyclic(fs, s)) {
                intervals.push(MergedInterval {
                    poly,
                    perim,
                    start: fs,
                    len: flen,
                    offset,
                });
                offset += flen;
                cur = (poly, (fs + flen) % perim);
            } else if let Some(&(gs, _ge, gi, is_a)) =
                glue[poly].iter().find(|&&(gs, _, _, _)| near_cyclic(gs, s))
            {
                // Jump through the glue pairing: the walk enters the glued
                // segment at its start, which is identified with the end of
                // the partner segment on the other polygon.
                let _ = gs;
                let p = self.expanded[gi];
                let (npoly, ns) = if is_a {
                    (p.b_poly, p.b_start + p.len)
                } else {
                    (p.a_poly, p.a_start + p.len)
                };
                let nperim = self.domain.polygons[npoly].perimeter();
                cur = (npoly, ns % nperim);
            } else {
                return Err(SchemeError::Merge(format!(
                    "walk stuck at polygon {poly}, arc length {s}"
                )));
            }
            if !intervals.is_empty() && cur == (start_poly, start_s) {
                break;
            }
        }
        let visited: f64 = intervals.iter().map(|iv| iv.len).sum();
        let total_free: f64 = free_arcs
            .iter()
            .flat_map(|a| a.iter().map(|&(_, l)| l))
            .sum();
        if (visited - total_free).abs() > 1e-6 {
            return Err(SchemeError::Merge(
                "glued boundary has more than one circle component".into(),
            ));
        }
        Ok(MergedBoundary {
            intervals,
            total: visited,
        })
    }
}

/// One arc of a polygon boundary placed on the merged circle.
#[derive(Debug, Clone)]
pub struct MergedInterval {
    pub poly: usize,
    pub perim: f64,
    pub start: f64,
    pub len: f64,
    pub offset: f64,
}

/// The boundary circle of a multipolygon glued along inter-polygon pairings.
#[derive(Debug, Clone)]
pub struct MergedBoundary {
    pub intervals: Vec<MergedInterval>,
    pub total: f64,
}

impl MergedBoundary {
    /// Merged circle coordinate of `(poly, s)`, when `s` lies on a free arc.
    pub fn to_merged(&self, poly: usize, s: f64) -> Option<f64> {
        for iv in &self.intervals {
            if iv.poly != poly {
                continue;
            }
            let mut off = (s - iv.start).rem_euclid(iv.perim);
            if off > iv.perim - 1e-9 {
                off = 0.0;
            }
            if off <= iv.len + 1e-9 {
                return Some((iv.offset + off.min(iv.len)) % self.total);
            }
        }
        None
    }
}

/// Convenience: the interior angle in radians contributed by a straight-edge
/// point is pi; exported for tests.
pub const STRAIGHT_ANGLE: f64 = PI;
