//! Linear local connectivity checks on a rasterized quotient.
//!
//! The quotient is discretized into square cells (4-neighbor adjacency
//! within polygons, zero-length links across identified boundary points).
//! Ball membership on the grid comes from the closed-form decomposition;
//! the grid also provides a Dijkstra distance oracle (8-neighbor, exact for
//! the max metric on convex cells up to O(h)).

use crate::balls::{decompose_ball, BallDecomposition, BallError};
use crate::geometry::{Metric, Point2};
use crate::scheme::PairingScheme;
use rand::{Rng, SeedableRng};
use std::collections::BinaryHeap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LlcError {
    #[error(transparent)]
    Ball(#[from] BallError),
    #[error("cell size {0} too coarse: need h < {1}")]
    TooCoarse(f64, f64),
    #[error("ball of radius {0} covers the whole grid")]
    BallCoversGrid(f64),
    #[error("radius {0} must be below the diameter {1}")]
    RadiusTooLarge(f64, f64),
    #[error("point ({0}, {1}) has no grid cell")]
    NoCell(f64, f64),
}

struct GridPoly {
    origin: Point2,
    nx: usize,
    ny: usize,
    /// Global cell id per (ix, iy), row-major; `u32::MAX` for outside cells.
    ids: Vec<u32>,
}

pub struct QuotientGrid {
    pub h: f64,
    polys: Vec<GridPoly>,
    pub centers: Vec<Point2>,
    pub poly_of: Vec<usize>,
    pub orth: Vec<Vec<u32>>,
    pub diag: Vec<Vec<u32>>,
    pub links: Vec<Vec<u32>>,
    /// Snapping mismatch per link (same shape as `links`): the max-metric
    /// distance from each endpoint's cell center to the exact boundary point
    /// it stands in for. Charging this in the distance oracle stops chains
    /// of free links from compounding cell-rounding error.
    pub link_costs: Vec<Vec<f64>>,
}

impl QuotientGrid {
    pub fn cell_count(&self) -> usize {
        self.centers.len()
    }

    /// Number of identification link pairs.
    pub fn link_count(&self) -> usize {
        self.links.iter().map(|l| l.len()).sum::<usize>() / 2
    }

    fn id_at(&self, poly: usize, ix: i64, iy: i64) -> Option<u32> {
        let gp = &self.polys[poly];
        if ix < 0 || iy < 0 || ix >= gp.nx as i64 || iy >= gp.ny as i64 {
            return None;
        }
        let id = gp.ids[iy as usize * gp.nx + ix as usize];
        (id != u32::MAX).then_some(id)
    }

    /// Cell owning `p`; falls back to the nearest populated cell in the
    /// 3x3 neighborhood (boundary points may round outward).
    pub fn cell_at(&self, scheme: &PairingScheme, p: Point2) -> Option<u32> {
        let poly = scheme.domain.polygon_containing(p)?;
        let gp = &self.polys[poly];
        let ix = ((p.x - gp.origin.x) / self.h).floor() as i64;
        let iy = ((p.y - gp.origin.y) / self.h).floor() as i64;
        if let Some(id) = self.id_at(poly, ix, iy) {
            return Some(id);
        }
        let mut best: Option<(f64, u32)> = None;
        for dy in -1..=1 {
            for dx in -1..=1 {
                if let Some(id) = self.id_at(poly, ix + dx, iy + dy) {
                    let d = Metric::Max.dist(self.centers[id as usize], p);
                    if best.map_or(true, |(bd, _)| d < bd) {
                        best = Some((d, id));
                    }
                }
            }
        }
        best.map(|(_, id)| id)
    }

    /// Marks the cells whose centers lie in some piece of the decomposition.
    pub fn mark_ball(&self, dec: &BallDecomposition) -> Vec<bool> {
        let mut out = vec![false; self.cell_count()];
        for piece in &dec.pieces {
            let gp = &self.polys[piece.poly];
            let x0 = ((piece.center.x - piece.radius - gp.origin.x) / self.h).floor() as i64;
            let x1 = ((piece.center.x + piece.radius - gp.origin.x) / self.h).ceil() as i64;
            let y0 = ((piece.center.y - piece.radius - gp.origin.y) / self.h).floor() as i64;
            let y1 = ((piece.center.y + piece.radius - gp.origin.y) / self.h).ceil() as i64;
            for iy in y0..=y1 {
                for ix in x0..=x1 {
                    if let Some(id) = self.id_at(piece.poly, ix, iy) {
                        if !out[id as usize] && piece.box_contains(self.centers[id as usize]) {
                            out[id as usize] = true;
                        }
                    }
                }
            }
        }
        out
    }

    /// BFS component check over `allowed` cells using 4-neighbor adjacency
    /// plus identification links; returns a path when one exists.
    pub fn path_within(&self, allowed: &[bool], from: u32, to: u32) -> Option<Vec<u32>> {
        if !allowed[from as usize] || !allowed[to as usize] {
            return None;
        }
        let n = self.cell_count();
        let mut prev: Vec<u32> = vec![u32::MAX; n];
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        seen[from as usize] = true;
        queue.push_back(from);
        while let Some(u) = queue.pop_front() {
            if u == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur as usize];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &v in self.orth[u as usize].iter().chain(&self.links[u as usize]) {
                if allowed[v as usize] && !seen[v as usize] {
                    seen[v as usize] = true;
                    prev[v as usize] = u;
                    queue.push_back(v);
                }
            }
        }
        None
    }

    /// True when the `allowed` cells form at most one connected component.
    pub fn one_component(&self, allowed: &[bool]) -> bool {
        let n = self.cell_count();
        let start = match (0..n).find(|&i| allowed[i]) {
            Some(s) => s as u32,
            None => return true,
        };
        let mut seen = vec![false; n];
        let mut stack = vec![start];
        seen[start as usize] = true;
        let mut count = 1usize;
        while let Some(u) = stack.pop() {
            for &v in self.orth[u as usize].iter().chain(&self.links[u as usize]) {
                if allowed[v as usize] && !seen[v as usize] {
                    seen[v as usize] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == allowed.iter().filter(|&&a| a).count()
    }

    /// Dijkstra distances from `source` in the discretized max metric:
    /// orthogonal and diagonal steps cost `h`, identification links cost
    /// their snapping mismatch (at most one cell).
    /// Cells beyond `rmax` keep the value `f64::INFINITY`.
    pub fn max_metric_distances(
        &self,
        scheme: &PairingScheme,
        source: Point2,
        rmax: f64,
    ) -> Result<Vec<f64>, LlcError> {
        let start = self
            .cell_at(scheme, source)
            .ok_or(LlcError::NoCell(source.x, source.y))?;
        let mut dist = vec![f64::INFINITY; self.cell_count()];
        let mut heap: BinaryHeap<std::cmp::Reverse<(u64, u32)>> = BinaryHeap::new();
        let enc = |d: f64| (d * 1e12) as u64;
        // Seed the 3x3 neighborhood of the source with exact distances: a
        // lattice Chebyshev path through one of these cells realizes the
        // true max distance, so free-space values carry no half-cell bias.
        let pi = self.poly_of[start as usize];
        let gp = &self.polys[pi];
        let sx = ((source.x - gp.origin.x) / self.h).floor() as i64;
        let sy = ((source.y - gp.origin.y) / self.h).floor() as i64;
        for dy in -1..=1 {
            for dx in -1..=1 {
                if let Some(id) = self.id_at(pi, sx + dx, sy + dy) {
                    let d0 = Metric::Max.dist(source, self.centers[id as usize]);
                    if d0 < dist[id as usize] {
                        dist[id as usize] = d0;
                        heap.push(std::cmp::Reverse((enc(d0), id)));
                    }
                }
            }
        }
        while let Some(std::cmp::Reverse((du, u))) = heap.pop() {
            let du = du as f64 / 1e12;
            if du > dist[u as usize] + 1e-12 || du > rmax {
                continue;
            }
            let neighbors = self.orth[u as usize]
                .iter()
                .chain(&self.diag[u as usize])
                .map(|&v| (v, self.h))
                .chain(
                    self.links[u as usize]
                        .iter()
                        .zip(&self.link_costs[u as usize])
                        .map(|(&v, &c)| (v, c)),
                );
            for (v, w) in neighbors {
                let nd = du + w;
                if nd + 1e-15 < dist[v as usize] {
                    dist[v as usize] = nd;
                    heap.push(std::cmp::Reverse((enc(nd), v)));
                }
            }
        }
        Ok(dist)
    }
}

/// Rasterizes the scheme's domain at cell size `h` and installs
/// identification links between paired boundary cells.
pub fn build_grid(scheme: &PairingScheme, h: f64) -> Result<QuotientGrid, LlcError> {
    let d_min = scheme.domain.d_min(Metric::Max);
    if !(h > 0.0) || h >= d_min / 4.0 {
        return Err(LlcError::TooCoarse(h, d_min / 4.0));
    }
    let mut polys = vec![];
    let mut centers = vec![];
    let mut poly_of = vec![];
    for (pi, pg) in scheme.domain.polygons.iter().enumerate() {
        let (lo, hi) = pg.bbox();
        let origin = Point2::new(lo.x, lo.y);
        let nx = ((hi.x - lo.x) / h).ceil() as usize;
        let ny = ((hi.y - lo.y) / h).ceil() as usize;
        let mut ids = vec![u32::MAX; nx * ny];
        for iy in 0..ny {
            for ix in 0..nx {
                let c = Point2::new(
                    origin.x + (ix as f64 + 0.5) * h,
                    origin.y + (iy as f64 + 0.5) * h,
                );
                if pg.contains(c) {
                    ids[iy * nx + ix] = centers.len() as u32;
                    centers.push(c);
                    poly_of.push(pi);
                }
            }
        }
        polys.push(GridPoly { origin, nx, ny, ids });
    }
    let mut grid = QuotientGrid {
        h,
        polys,
        centers,
        poly_of,
        orth: vec![],
        diag: vec![],
        links: vec![],
        link_costs: vec![],
    };
    let n = grid.cell_count();
    grid.orth = vec![vec![]; n];
    grid.diag = vec![vec![]; n];
    grid.links = vec![vec![]; n];
    grid.link_costs = vec![vec![]; n];
    for (pi, gp) in grid.polys.iter().enumerate() {
        for iy in 0..gp.ny as i64 {
            for ix in 0..gp.nx as i64 {
                let Some(id) = grid.id_at(pi, ix, iy) else { continue };
                let mut orth = vec![];
                let mut diag = vec![];
                for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    if let Some(v) = grid.id_at(pi, ix + dx, iy + dy) {
                        orth.push(v);
                    }
                }
                for (dx, dy) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                    if let Some(v) = grid.id_at(pi, ix + dx, iy + dy) {
                        diag.push(v);
                    }
                }
                grid.orth[id as usize] = orth;
                grid.diag[id as usize] = diag;
            }
        }
    }
    // Identification links: sample each pairing at h/2, offset inward by a
    // third of a cell so both ends land in valid boundary cells.
    for p in &scheme.expanded {
        let steps = ((p.len / (h / 2.0)).ceil() as usize).max(1);
        for k in 0..=steps {
            let t = p.len * k as f64 / steps as f64;
            // Each end links the snapped cell and its two tangential
            // neighbors: a crossing path can then enter and leave through a
            // cell lying on a geodesic through the sample point, so the
            // charged cost has no systematic slack.
            let mut ends: [Vec<(u32, f64)>; 2] = [vec![], vec![]];
            for (slot, (poly, s)) in [
                (0usize, (p.a_poly, p.a_start + t)),
                (1, (p.b_poly, p.b_start + (p.len - t))),
            ] {
                let pg = &scheme.domain.polygons[poly];
                let s = pg.normalize_s(s);
                let pt = pg.arc_length_point(s);
                let nrm = pg.inward_normal_at(s);
                for o in [-1.0, 0.0, 1.0] {
                    let inner = Point2::new(
                        pt.x + nrm.x * h / 3.0 + nrm.y * o * h,
                        pt.y + nrm.y * h / 3.0 - nrm.x * o * h,
                    );
                    if let Some(id) = grid.cell_at(scheme, inner) {
                        if !ends[slot].iter().any(|&(v, _)| v == id) {
                            let cost = Metric::Max.dist(grid.centers[id as usize], pt);
                            ends[slot].push((id, cost));
                        }
                    }
                }
            }
            for &(a, ca) in &ends[0] {
                for &(b, cb) in &ends[1] {
                    if a == b {
                        continue;
                    }
                    let cost = ca + cb;
                    match grid.links[a as usize].iter().position(|&v| v == b) {
                        Some(i) => {
                            // Repeated samples for the same cell pair keep the
                            // smallest mismatch.
                            if cost < grid.link_costs[a as usize][i] {
                                grid.link_costs[a as usize][i] = cost;
                                let j = grid.links[b as usize]
                                    .iter()
                                    .position(|&v| v == a)
                                    .unwrap();
                                grid.link_costs[b as usize][j] = cost;
                            }
                        }
                        None => {
                            grid.links[a as usize].push(b);
                            grid.link_costs[a as usize].push(cost);
                            grid.links[b as usize].push(a);
                            grid.link_costs[b as usize].push(cost);
                        }
                    }
                }
            }
        }
    }
    Ok(grid)
}

/// True when the grid cells at quotient distance >= r from `center` form one
/// connected component.
pub fn complement_connected(
    scheme: &PairingScheme,
    grid: &QuotientGrid,
    center: Point2,
    r: f64,
) -> Result<bool, LlcError> {
    let diam = scheme.domain.diam(Metric::Max);
    if r >= diam {
        return Err(LlcError::RadiusTooLarge(r, diam));
    }
    let dec = decompose_ball(scheme, center, r)?;
    let ball = grid.mark_ball(&dec);
    if ball.iter().all(|&b| b) {
        return Err(LlcError::BallCoversGrid(r));
    }
    let complement: Vec<bool> = ball.iter().map(|&b| !b).collect();
    Ok(grid.one_component(&complement))
}

#[derive(Debug, Clone, Copy)]
pub struct LlcSample {
    pub center: Point2,
    pub r: f64,
    pub llc1_ok: bool,
    pub llc2_ok: bool,
}

#[derive(Debug, Clone)]
pub struct LlcReport {
    pub lambda_tested: f64,
    pub samples: Vec<LlcSample>,
    pub all_pass: bool,
}

/// Checks LLC1 (points of B(a,r) connect within B(a, lambda r)) and LLC2
/// (points outside B(a,r) connect avoiding B(a, r/lambda)) for each sample,
/// using `pairs` random cell pairs per sample. Failures are recorded, not
/// errors.
pub fn llc_check(
    scheme: &PairingScheme,
    grid: &QuotientGrid,
    lambda: f64,
    samples: &[(Point2, f64)],
    pairs: usize,
    seed: u64,
) -> Result<LlcReport, LlcError> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![];
    for &(a, r) in samples {
        let ball_r = grid.mark_ball(&decompose_ball(scheme, a, r)?);
        let ball_lr = grid.mark_ball(&decompose_ball(scheme, a, lambda * r)?);
        let ball_small = grid.mark_ball(&decompose_ball(scheme, a, r / lambda)?);
        let inside: Vec<u32> = (0..grid.cell_count() as u32)
            .filter(|&i| ball_r[i as usize])
            .collect();
        let outside: Vec<u32> = (0..grid.cell_count() as u32)
            .filter(|&i| !ball_r[i as usize])
            .collect();
        let mut llc1_ok = true;
        let mut llc2_ok = true;
        for _ in 0..pairs {
            if inside.len() >= 2 {
                let x = inside[rng.gen_range(0..inside.len())];
                let y = inside[rng.gen_range(0..inside.len())];
                match grid.path_within(&ball_lr, x, y) {
                    Some(path) => debug_assert!(verify_path(grid, &ball_lr, &path)),
                    None => llc1_ok = false,
                }
            }
            if outside.len() >= 2 {
                let x = outside[rng.gen_range(0..outside.len())];
                let y = outside[rng.gen_range(0..outside.len())];
                let avoid: Vec<bool> = ball_small.iter().map(|&b| !b).collect();
                match grid.path_within(&avoid, x, y) {
                    Some(path) => debug_assert!(verify_path(grid, &avoid, &path)),
                    None => llc2_ok = false,
                }
            }
        }
        out.push(LlcSample {
            center: a,
            r,
            llc1_ok,
            llc2_ok,
        });
    }
    let all_pass = out.iter().all(|s| s.llc1_ok && s.llc2_ok);
    Ok(LlcReport {
        lambda_tested: lambda,
        samples: out,
        all_pass,
    })
}

/// Every consecutive pair adjacent or linked, every cell allowed.
pub fn verify_path(grid: &QuotientGrid, allowed: &[bool], path: &[u32]) -> bool {
    path.iter().all(|&c| allowed[c as usize])
        && path.windows(2).all(|w| {
            grid.orth[w[0] as usize].contains(&w[1]) || grid.links[w[0] as usize].contains(&w[1])
        })
}

/// Smallest of the given lambdas passing all samples, if any.
pub fn smallest_passing_lambda(
    scheme: &PairingScheme,
    grid: &QuotientGrid,
    lambdas: &[f64],
    samples: &[(Point2, f64)],
    pairs: usize,
    seed: u64,
) -> Result<Option<f64>, LlcError> {
    let mut sorted = lambdas.to_vec();
    sorted.sort_by(f64::total_cmp);
    for l in sorted {
        if llc_check(scheme, grid, l, samples, pairs, seed)?.all_pass {
            return Ok(Some(l));
        }
    }
    Ok(None)
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

    #[test]
    fn torus_grid_shape() {
        let t = torus();
        let g = build_grid(&t, 0.01).unwrap();
        assert_eq!(g.cell_count(), 100 * 100);
        // Two length-1 gluings sampled every half-cell, with each sample
        // fanning out to the snapped cell plus its tangential neighbors on
        // both sides: ~100 cells x ~5 distinct pairs per gluing.
        let links = g.link_count();
        assert!((800..=1400).contains(&links), "links {links}");
        assert!(build_grid(&t, 0.3).is_err());
    }

    #[test]
    fn grids_are_connected() {
        for scheme in [torus(), w_square(10)] {
            let g = build_grid(&scheme, 0.02).unwrap();
            let all = vec![true; g.cell_count()];
            assert!(g.one_component(&all));
        }
    }

    #[test]
    fn paired_boundary_cells_have_links() {
        let t = torus();
        let g = build_grid(&t, 0.02).unwrap();
        // Every cell along the bottom row must carry a link to the top row.
        for i in 0..g.cell_count() {
            let c = g.centers[i];
            if c.y < g.h {
                assert!(
                    !g.links[i].is_empty(),
                    "bottom cell at {c:?} has no link"
                );
            }
        }
    }

    #[test]
    fn distance_oracle_wraps() {
        let t = torus();
        let g = build_grid(&t, 0.005).unwrap();
        let d = g
            .max_metric_distances(&t, Point2::new(0.1, 0.5), 1.0)
            .unwrap();
        let at = |p: Point2| d[g.cell_at(&t, p).unwrap() as usize];
        assert!((at(Point2::new(0.9, 0.5)) - 0.2).abs() < 0.02);
        assert!((at(Point2::new(0.5, 0.5)) - 0.4).abs() < 0.02);
        // Max metric: diagonal moves are free in the dominated coordinate.
        assert!((at(Point2::new(0.4, 0.7)) - 0.3).abs() < 0.02);
    }

    #[test]
    fn torus_complement_connected() {
        let t = torus();
        let g = build_grid(&t, 0.01).unwrap();
        assert!(complement_connected(&t, &g, Point2::new(0.5, 0.5), 0.2).unwrap());
        assert!(complement_connected(&t, &g, Point2::new(0.1, 0.1), 0.3).unwrap());
        assert!(matches!(
            complement_connected(&t, &g, Point2::new(0.5, 0.5), 1.5),
            Err(LlcError::RadiusTooLarge(..))
        ));
    }

    #[test]
    fn sphere_like_complements_connected() {
        let w = w_square(12);
        let g = build_grid(&w, 0.01).unwrap();
        for c in [
            Point2::new(0.5, 0.5),
            Point2::new(0.0, 0.25),
            Point2::new(1.0, 0.5),
            Point2::new(0.2, 0.0),
        ] {
            assert!(complement_connected(&w, &g, c, 0.3).unwrap(), "center {c:?}");
        }
    }

    #[test]
    fn llc_passes_at_four_k() {
        let w = w_square(12);
        let g = build_grid(&w, 0.01).unwrap();
        let samples = [
            (Point2::new(0.5, 0.5), 0.1),
            (Point2::new(0.0, 0.25), 0.1),
            (Point2::new(0.0, 0.125), 0.05),
            (Point2::new(1.0, 0.5), 0.12),
        ];
        let rep = llc_check(&w, &g, 4.0, &samples, 10, 99).unwrap();
        assert!(rep.all_pass, "{:?}", rep.samples);
    }

    #[test]
    fn llc_monotone_in_lambda_on_torus() {
        let t = torus();
        let g = build_grid(&t, 0.01).unwrap();
        let samples = [(Point2::new(0.5, 0.5), 0.1), (Point2::new(0.1, 0.5), 0.15)];
        let two = llc_check(&t, &g, 2.0, &samples, 10, 7).unwrap();
        assert!(two.all_pass);
        let four = llc_check(&t, &g, 4.0, &samples, 10, 7).unwrap();
        assert!(four.all_pass);
        let best = smallest_passing_lambda(&t, &g, &[4.0, 2.0], &samples, 10, 7).unwrap();
        assert_eq!(best, Some(2.0));
    }
}
