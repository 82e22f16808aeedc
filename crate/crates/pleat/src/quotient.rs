//! The quotient pseudometric: infimum over chains of intra-polygon hops and
//! free jumps across identified boundary points, computed as a shortest path
//! on a discretized graph with zero-cost identification edges.

use crate::geometry::{GeomError, Metric, Point2};
use crate::scheme::PairingScheme;
use petgraph::graph::{NodeIndex, UnGraph};
use std::collections::{HashMap, HashSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuotientError {
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error("point ({0}, {1}) lies outside the domain")]
    OutsideDomain(f64, f64),
    #[error("sample spacing must be positive")]
    BadSpacing,
}

/// Options for the discretized distance computation.
#[derive(Debug, Clone, Copy)]
pub struct QuotientOpts {
    pub metric: Metric,
    /// Boundary sample spacing. Paired segments are sampled jointly at
    /// parameters `t` and `len - t`, so identification edges are exact.
    pub h: f64,
    /// Intra-polygon edges per sample node (plus all endpoint/query nodes).
    pub k_nearest: usize,
    /// Connect all intra-polygon node pairs (quadratic but exact).
    pub dense: bool,
}

impl QuotientOpts {
    pub fn new(metric: Metric, h: f64) -> Self {
        QuotientOpts {
            metric,
            h,
            k_nearest: 32,
            dense: false,
        }
    }
}

/// One leg of a realized chain: a polyline inside one polygon, or a free
/// jump between identified boundary points.
#[derive(Debug, Clone)]
pub enum PathLeg {
    Walk {
        poly: usize,
        points: Vec<Point2>,
        len: f64,
    },
    Jump {
        from: (usize, Point2),
        to: (usize, Point2),
    },
}

/// A computed upper bound for the quotient distance at spacing `h`.
#[derive(Debug, Clone)]
pub struct DistanceResult {
    pub value: f64,
    pub path: Vec<PathLeg>,
    pub h: f64,
    pub converged: bool,
}

struct ChainGraph {
    graph: UnGraph<(usize, Point2), f64>,
    queries: Vec<NodeIndex>,
}

fn build_graph(
    scheme: &PairingScheme,
    queries: &[Point2],
    opts: &QuotientOpts,
) -> Result<ChainGraph, QuotientError> {
    if opts.h <= 0.0 {
        return Err(QuotientError::BadSpacing);
    }
    let mut graph = UnGraph::new_undirected();
    let mut by_key: HashMap<(usize, i64, i64), NodeIndex> = HashMap::new();
    let mut special: Vec<NodeIndex> = vec![];
    let key = |poly: usize, p: Point2| {
        (
            poly,
            (p.x * 1e9).round() as i64,
            (p.y * 1e9).round() as i64,
        )
    };
    let mut add_node = |graph: &mut UnGraph<(usize, Point2), f64>, poly: usize, p: Point2| {
        *by_key
            .entry(key(poly, p))
            .or_insert_with(|| graph.add_node((poly, p)))
    };
    // Boundary samples, aligned across each pairing so that the zero-cost
    // edges connect exactly identified points.
    for pairing in &scheme.expanded {
        let pa = &scheme.domain.polygons[pairing.a_poly];
        let pb = &scheme.domain.polygons[pairing.b_poly];
        let n = (pairing.len / opts.h).ceil().max(1.0) as usize;
        for k in 0..=n {
            let t = pairing.len * k as f64 / n as f64;
            let qa = pa.arc_length_point(pairing.a_start + t);
            let qb = pb.arc_length_point(pairing.b_start + (pairing.len - t));
            let na = add_node(&mut graph, pairing.a_poly, qa);
            let nb = add_node(&mut graph, pairing.b_poly, qb);
            if na != nb && graph.find_edge(na, nb).is_none() {
                graph.add_edge(na, nb, 0.0);
            }
            if k == 0 || k == n {
                special.push(na);
                special.push(nb);
            }
        }
    }
    for sp in &scheme.singular_points {
        let p = scheme.domain.polygons[sp.poly].arc_length_point(sp.s);
        let n = add_node(&mut graph, sp.poly, p);
        special.push(n);
    }
    let mut query_nodes = vec![];
    for &q in queries {
        let poly = scheme
            .domain
            .polygon_containing(q)
            .ok_or(QuotientError::OutsideDomain(q.x, q.y))?;
        let n = add_node(&mut graph, poly, q);
        special.push(n);
        query_nodes.push(n);
    }
    special.sort();
    special.dedup();
    // Intra-polygon edges: every node links to the special set plus its
    // k nearest neighbours (all pairs when `dense`).
    let mut by_poly: HashMap<usize, Vec<NodeIndex>> = HashMap::new();
    for idx in graph.node_indices() {
        by_poly.entry(graph[idx].0).or_default().push(idx);
    }
    let mut seen: HashSet<(NodeIndex, NodeIndex)> = HashSet::new();
    let mut edges: Vec<(NodeIndex, NodeIndex)> = vec![];
    for (&poly, nodes) in &by_poly {
        let specials_here: Vec<NodeIndex> = special
            .iter()
            .copied()
            .filter(|&s| graph[s].0 == poly)
            .collect();
        for &u in nodes {
            let mut targets: Vec<NodeIndex> = vec![];
            if opts.dense || nodes.len() <= opts.k_nearest + 1 || query_nodes.contains(&u) {
                targets.extend(nodes.iter().copied().filter(|&v| v != u));
            } else {
                let mut others: Vec<(f64, NodeIndex)> = nodes
                    .iter()
                    .copied()
                    .filter(|&v| v != u)
                    .map(|v| (opts.metric.dist(graph[u].1, graph[v].1), v))
                    .collect();
                others.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                targets.extend(others.iter().take(opts.k_nearest).map(|&(_, v)| v));
                targets.extend(specials_here.iter().copied().filter(|&v| v != u));
            }
            for v in targets {
                let e = if u < v { (u, v) } else { (v, u) };
                if seen.insert(e) {
                    edges.push(e);
                }
            }
        }
    }
    for (u, v) in edges {
        let poly = &scheme.domain.polygons[graph[u].0];
        let w = if poly.is_convex() {
            opts.metric.dist(graph[u].1, graph[v].1)
        } else {
            poly.intrinsic_distance(graph[u].1, graph[v].1, opts.metric)?
        };
        graph.add_edge(u, v, w);
    }
    Ok(ChainGraph {
        graph,
        queries: query_nodes,
    })
}

/// Discretized quotient distance between `x` and `y` at spacing `h`: the
/// shortest chain on the sample graph. Always an upper bound for the true
/// quotient distance; non-increasing as `h` is halved.
pub fn quotient_distance(
    scheme: &PairingScheme,
    x: Point2,
    y: Point2,
    opts: &QuotientOpts,
) -> Result<DistanceResult, QuotientError> {
    let cg = build_graph(scheme, &[x, y], opts)?;
    let (start, goal) = (cg.queries[0], cg.queries[1]);
    if start == goal {
        return Ok(DistanceResult {
            value: 0.0,
            path: vec![],
            h: opts.h,
            converged: true,
        });
    }
    let result = petgraph::algo::astar(
        &cg.graph,
        start,
        |n| n == goal,
        |e| *e.weight(),
        |_| 0.0,
    );
    let (value, nodes) = result.expect("chain graph is connected within reachable polygons");
    let mut path = vec![];
    for w in nodes.windows(2) {
        let (pu, qu) = cg.graph[w[0]];
        let (pv, qv) = cg.graph[w[1]];
        // Parallel edges are possible (a planar hop and a free jump between
        // the same nodes); the shortest path always uses the lightest one.
        let wt = cg
            .graph
            .edges_connecting(w[0], w[1])
            .map(|e| *e.weight())
            .fold(f64::INFINITY, f64::min);
        if wt == 0.0 {
            path.push(PathLeg::Jump {
                from: (pu, qu),
                to: (pv, qv),
            });
        } else {
            let poly = &scheme.domain.polygons[pu];
            let pts = if poly.is_convex() {
                vec![qu, qv]
            } else {
                poly.intrinsic_path(qu, qv, opts.metric)?.0
            };
            path.push(PathLeg::Walk {
                poly: pu,
                points: pts,
                len: wt,
            });
        }
    }
    Ok(DistanceResult {
        value,
        path,
        h: opts.h,
        converged: true,
    })
}

/// Symmetric matrix of pairwise discretized quotient distances.
pub fn distance_matrix(
    scheme: &PairingScheme,
    points: &[Point2],
    opts: &QuotientOpts,
) -> Result<Vec<Vec<f64>>, QuotientError> {
    let cg = build_graph(scheme, points, opts)?;
    let n = points.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        let dist = petgraph::algo::dijkstra(&cg.graph, cg.queries[i], None, |e| *e.weight());
        for j in 0..n {
            out[i][j] = dist.get(&cg.queries[j]).copied().unwrap_or(f64::INFINITY);
        }
    }
    // Enforce exact symmetry (floating summation order may differ).
    for i in 0..n {
        for j in i + 1..n {
            let v = out[i][j].min(out[j][i]);
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    Ok(out)
}

/// Halves `h` (up to 12 times) until successive values differ by less than
/// `tol`; the node count is capped to keep refinement affordable.
pub fn refine_until(
    scheme: &PairingScheme,
    x: Point2,
    y: Point2,
    metric: Metric,
    h0: f64,
    tol: f64,
) -> Result<DistanceResult, QuotientError> {
    let mut opts = QuotientOpts::new(metric, h0);
    let mut last = quotient_distance(scheme, x, y, &opts)?;
    for _ in 0..12 {
        opts.h /= 2.0;
        let total_len: f64 = scheme.expanded.iter().map(|p| p.len).sum();
        if 2.0 * total_len / opts.h > 400_000.0 {
            break;
        }
        let next = quotient_distance(scheme, x, y, &opts)?;
        let delta = last.value - next.value;
        last = next;
        if delta.abs() < tol {
            last.converged = true;
            return Ok(last);
        }
    }
    last.converged = false;
    Ok(last)
}
