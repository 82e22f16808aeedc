//! Command-line interface: validate scheme files, compute quotient
//! distances, decompose and measure balls, run the regularity / local
//! connectivity scans, and reproduce the horseshoe growth experiment.
//!
//! Exit codes: 0 success, 1 unreadable input, 2 invalid scheme or query,
//! 3 failure to converge to the requested tolerance.

use crate::balls::{decompose_ball, Provenance};
use crate::geometry::{Metric, Point2};
use crate::horseshoe::horseshoe_area_experiment;
use crate::llc::{build_grid, complement_connected, llc_check};
use crate::measure::{extension_constant, log_radii, regularity_scan, union_area};
use crate::quotient::{refine_until, PathLeg};
use crate::scheme::PairingScheme;
use crate::schemefile::{builtin_json, singular_class_count, SchemeFile, BUILTIN_NAMES};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "pleat",
    version,
    about = "Metric quotients of multipolygons under boundary pairings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,
}

/// A scheme argument: a builtin name or a path to a JSON scheme file.
#[derive(Debug, Args)]
pub struct SchemeArg {
    /// Builtin name (torus, example-1.3, tight-horseshoe, four-rectangle)
    /// or path to a scheme file.
    pub scheme: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a scheme file: fullness, linking, singular classes.
    Validate {
        #[command(flatten)]
        scheme: SchemeArg,
        /// Merge polygons along their gluings before the linking check.
        #[arg(long)]
        merge: bool,
    },
    /// Quotient distance between two points, refined until convergence.
    Distance {
        #[command(flatten)]
        scheme: SchemeArg,
        /// Start point as `polygon:x,y`.
        #[arg(long)]
        from: String,
        /// End point as `polygon:x,y`.
        #[arg(long)]
        to: String,
        /// Initial sample spacing (default: scheme-derived).
        #[arg(long)]
        h: Option<f64>,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Print the realized chain of walks and jumps.
        #[arg(long)]
        path: bool,
    },
    /// Decompose a metric ball into planar pieces and measure it.
    Ball {
        #[command(flatten)]
        scheme: SchemeArg,
        /// Center as `polygon:x,y`.
        #[arg(long)]
        center: String,
        #[arg(short, long)]
        radius: f64,
        /// Write one CSV row per piece.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Render the domain, pairings and pieces.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Sample ball areas over centers and radii and test 2-regularity.
    Regularity {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 30)]
        centers: usize,
        #[arg(long, default_value_t = 8)]
        radii: usize,
        /// Largest radius sampled (default: a tenth of the diameter).
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Linear local connectivity check on a grid approximation.
    Llc {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 4.0)]
        lambda: f64,
        /// Grid spacing (default: scheme-derived).
        #[arg(long)]
        h: Option<f64>,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 6)]
        pairs: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Ball-area growth at the singular class of the tight horseshoe.
    Horseshoe {
        #[arg(long, default_value_t = 16)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        k_min: u32,
        #[arg(long, default_value_t = 8)]
        k_max: u32,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Plot area/r^2 against log2(1/r).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or unparsable input (exit 1).
    Input(String),
    /// Structurally valid input describing an invalid scheme or query (exit 2).
    Invalid(String),
    /// Computation did not converge to the requested tolerance (exit 3).
    NoConvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::NoConvergence(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Invalid(m) | CliError::NoConvergence(m) => m,
        }
    }
}

fn load(arg: &SchemeArg) -> Result<(SchemeFile, PairingScheme, bool), CliError> {
    let (text, is_builtin) = match builtin_json(&arg.scheme) {
        Some(t) => (t.to_string(), true),
        None => (
            std::fs::read_to_string(&arg.scheme)
                .map_err(|e| CliError::Input(format!("cannot read `{}`: {e}", arg.scheme)))?,
            false,
        ),
    };
    let file = SchemeFile::from_json(&text).map_err(|e| CliError::Input(e.to_string()))?;
    let scheme = file
        .to_scheme()
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    Ok((file, scheme, is_builtin))
}

/// Parses `polygon:x,y` (or plain `x,y` for single-polygon schemes).
fn parse_point(scheme: &PairingScheme, s: &str) -> Result<Point2, CliError> {
    let (id, coords) = match s.split_once(':') {
        Some((id, rest)) => (Some(id), rest),
        None => (None, s),
    };
    let mut it = coords.split(',');
    let bad = || CliError::Input(format!("expected `polygon:x,y`, got `{s}`"));
    let x: f64 = it.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let y: f64 = it.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    if it.next().is_some() {
        return Err(bad());
    }
    let p = Point2::new(x, y);
    let poly = match id {
        Some(id) => scheme
            .domain
            .index_of(id)
            .ok_or_else(|| CliError::Invalid(format!("no polygon `{id}`")))?,
        None if scheme.domain.polygons.len() == 1 => 0,
        None => {
            return Err(CliError::Input(format!(
                "`{s}` needs a polygon prefix in a multi-polygon scheme"
            )))
        }
    };
    if !scheme.domain.polygons[poly].contains(p) {
        return Err(CliError::Invalid(format!(
            "({x}, {y}) lies outside polygon `{}`",
            scheme.domain.polygons[poly].id
        )));
    }
    Ok(p)
}

fn write_out(path: &PathBuf, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Input(format!("cannot write `{}`: {e}", path.display())))
}

/// Deterministic sample of interior points, padded with points near the
/// scheme's special boundary locations.
fn sample_centers(scheme: &PairingScheme, n: usize, seed: u64) -> Vec<Point2> {
    let mut out = vec![];
    for &sp in &scheme.singular_points {
        out.push(scheme.domain.polygons[sp.poly].arc_length_point(sp.s));
    }
    for p in scheme.expanded.iter().take(4) {
        let poly = &scheme.domain.polygons[p.a_poly];
        out.push(poly.arc_length_point(p.a_start + 0.5 * p.len));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < n {
        let poly = &scheme.domain.polygons[rng.gen_range(0..scheme.domain.polygons.len())];
        let (lo, hi) = poly.bbox();
        let p = Point2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
        if poly.contains(p) {
            out.push(p);
        }
    }
    out.truncate(n.max(out.len().min(n + 8)));
    out
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Command::Validate { scheme, merge } => cmd_validate(&scheme, merge),
        Command::Distance {
            scheme,
            from,
            to,
            h,
            tol,
            path,
        } => cmd_distance(&scheme, &from, &to, h, tol, path),
        Command::Ball {
            scheme,
            center,
            radius,
            csv,
            svg,
        } => cmd_ball(&scheme, &center, radius, csv, svg),
        Command::Regularity {
            scheme,
            centers,
            radii,
            r_max,
            seed,
            csv,
        } => cmd_regularity(&scheme, centers, radii, r_max, seed, csv),
        Command::Llc {
            scheme,
            lambda,
            h,
            samples,
            pairs,
            seed,
            csv,
        } => cmd_llc(&scheme, lambda, h, samples, pairs, seed, csv),
        Command::Horseshoe {
            depth,
            k_min,
            k_max,
            csv,
            svg,
        } => cmd_horseshoe(depth, k_min, k_max, csv, svg),
    }
}

fn cmd_validate(arg: &SchemeArg, merge: bool) -> Result<(), CliError> {
    let (file, scheme, is_builtin) = load(arg)?;
    let full = scheme.check_full();
    let unlinked = scheme.check_unlinked(merge);
    println!(
        "scheme: {}{}",
        arg.scheme,
        if is_builtin { " (builtin)" } else { "" }
    );
    println!(
        "polygons: {}, boundary length: {:.12}, metric: {:?}",
        scheme.domain.polygons.len(),
        scheme.boundary_len(),
        file.metric
    );
    println!(
        "pairings: {} expanded, tail length: {:.3e}, uncovered: {:.3e}",
        scheme.expanded.len(),
        scheme.tail_pairing_len,
        scheme.uncovered_len
    );
    println!(
        "full: {}, plain: {}, singular classes: {}",
        if full.ok { "yes" } else { "no" },
        if unlinked.plain { "yes" } else { "no" },
        singular_class_count(&scheme)
    );
    if let Some((i, j)) = unlinked.witness {
        println!("linked witness: expanded pairings {i} and {j}");
    }
    println!("default h: {:.6}", scheme.default_h());
    Ok(())
}

fn cmd_distance(
    arg: &SchemeArg,
    from: &str,
    to: &str,
    h: Option<f64>,
    tol: f64,
    show_path: bool,
) -> Result<(), CliError> {
    let (file, scheme, _) = load(arg)?;
    let x = parse_point(&scheme, from)?;
    let y = parse_point(&scheme, to)?;
    let h0 = h.unwrap_or_else(|| scheme.default_h());
    let res = refine_until(&scheme, x, y, file.metric, h0, tol)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    println!("d = {:.9}", res.value);
    println!(
        "h = {:.6}, converged: {}",
        res.h,
        if res.converged { "yes" } else { "no" }
    );
    if show_path {
        for leg in &res.path {
            match leg {
                PathLeg::Walk { poly, points, len } => {
                    let pts: Vec<String> = points
                        .iter()
                        .map(|p| format!("({:.6}, {:.6})", p.x, p.y))
                        .collect();
                    println!(
                        "  walk in {}: {} (length {:.6})",
                        scheme.domain.polygons[*poly].id,
                        pts.join(" -> "),
                        len
                    );
                }
                PathLeg::Jump { from, to } => println!(
                    "  jump {}:({:.6}, {:.6}) ~ {}:({:.6}, {:.6})",
                    scheme.domain.polygons[from.0].id,
                    from.1.x,
                    from.1.y,
                    scheme.domain.polygons[to.0].id,
                    to.1.x,
                    to.1.y
                ),
            }
        }
    }
    if !res.converged {
        return Err(CliError::NoConvergence(format!(
            "distance did not settle within {tol} (last h = {})",
            res.h
        )));
    }
    Ok(())
}

fn provenance_label(p: &Provenance) -> String {
    match p {
        Provenance::Main => "main".into(),
        Provenance::ConicSpawn(i) => format!("conic:{i}"),
        Provenance::AccumulationSpawn(i) => format!("accumulation:{i}"),
        Provenance::VertexSpawn(i) => format!("vertex:{i}"),
        Provenance::CrossingSpawn(i) => format!("crossing:{i}"),
    }
}

fn cmd_ball(
    arg: &SchemeArg,
    center: &str,
    radius: f64,
    csv: Option<PathBuf>,
    svg: Option<PathBuf>,
) -> Result<(), CliError> {
    let (_, scheme, _) = load(arg)?;
    let c = parse_point(&scheme, center)?;
    let dec =
        decompose_ball(&scheme, c, radius).map_err(|e| CliError::Invalid(e.to_string()))?;
    let area = union_area(&scheme, &dec.pieces);
    println!(
        "pieces: {}, area: {:.9}{}, area/r^2: {:.6}",
        dec.pieces.len(),
        area.value,
        if area.exact {
            String::new()
        } else {
            format!(" (+- {:.1e})", area.std_err)
        },
        area.value / (radius * radius)
    );
    println!("possible undercount: {:.3e}", dec.tail_area_bound);
    if let Some(path) = csv {
        let mut s = String::from("piece,polygon,cx,cy,radius,provenance\n");
        for (i, p) in dec.pieces.iter().enumerate() {
            let _ = writeln!(
                s,
                "{i},{},{:.12},{:.12},{:.12},{}",
                scheme.domain.polygons[p.poly].id,
                p.center.x,
                p.center.y,
                p.radius,
                provenance_label(&p.provenance)
            );
        }
        write_out(&path, &s)?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = svg {
        write_out(&path, &render_ball_svg(&scheme, &dec.pieces))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_regularity(
    arg: &SchemeArg,
    centers: usize,
    radii: usize,
    r_max: Option<f64>,
    seed: u64,
    csv: Option<PathBuf>,
) -> Result<(), CliError> {
    let (_, scheme, _) = load(arg)?;
    let r_hi = r_max.unwrap_or_else(|| 0.1 * scheme.domain.diam(Metric::Max));
    let rs = log_radii(r_hi / 64.0, r_hi, radii.max(2));
    let cs = sample_centers(&scheme, centers.max(1), seed);
    let report =
        regularity_scan(&scheme, &cs, &rs).map_err(|e| CliError::Invalid(e.to_string()))?;
    println!(
        "centers: {}, radii: {} in [{:.4e}, {:.4e}]",
        cs.len(),
        rs.len(),
        rs[0],
        rs[rs.len() - 1]
    );
    println!(
        "area/r^2 in [{:.6}, {:.6}], c0 = {:.6}",
        report.ratio_min, report.ratio_max, report.c0
    );
    println!(
        "extended constant (all radii up to diameter): {:.6}",
        extension_constant(report.c0, scheme.domain.total_area(), report.r0)
    );
    for v in &report.violations {
        println!(
            "growth at ({:.6}, {:.6}): slope {:.4} per halving",
            v.center.x, v.center.y, v.slope
        );
    }
    println!("regular: {}", if report.regular { "yes" } else { "no" });
    if let Some(path) = csv {
        let mut s = String::from("cx,cy,r,area,ratio\n");
        for smp in &report.samples {
            let _ = writeln!(
                s,
                "{:.12},{:.12},{:.12},{:.12},{:.12}",
                smp.center.x, smp.center.y, smp.r, smp.area, smp.ratio
            );
        }
        write_out(&path, &s)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_llc(
    arg: &SchemeArg,
    lambda: f64,
    h: Option<f64>,
    samples: usize,
    pairs: usize,
    seed: u64,
    csv: Option<PathBuf>,
) -> Result<(), CliError> {
    let (_, scheme, _) = load(arg)?;
    let h = h.unwrap_or_else(|| scheme.default_h());
    let grid = build_grid(&scheme, h).map_err(|e| CliError::Invalid(e.to_string()))?;
    let diam = scheme.domain.diam(Metric::Max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cs = sample_centers(&scheme, samples.max(1), seed);
    let sampled: Vec<(Point2, f64)> = cs
        .into_iter()
        .map(|c| {
            // Keep lambda * r well under the diameter so both enlarged and
            // shrunk balls stay meaningful on the grid.
            let r = rng.gen_range(8.0 * h..(0.2 * diam / lambda).max(16.0 * h));
            (c, r)
        })
        .collect();
    let report = llc_check(&scheme, &grid, lambda, &sampled, pairs, seed)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    println!(
        "grid: {} cells at h = {:.6}, lambda = {}",
        grid.cell_count(),
        h,
        lambda
    );
    let mut complement_ok = true;
    for s in &report.samples {
        let comp = complement_connected(&scheme, &grid, s.center, s.r)
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        complement_ok &= comp;
        println!(
            "center ({:.4}, {:.4}) r = {:.4}: llc1 {}, llc2 {}, complement connected {}",
            s.center.x,
            s.center.y,
            s.r,
            if s.llc1_ok { "ok" } else { "FAIL" },
            if s.llc2_ok { "ok" } else { "FAIL" },
            if comp { "ok" } else { "FAIL" }
        );
    }
    println!(
        "all pass: {}",
        if report.all_pass && complement_ok {
            "yes"
        } else {
            "no"
        }
    );
    if let Some(path) = csv {
        let mut s = String::from("cx,cy,r,llc1,llc2\n");
        for smp in &report.samples {
            let _ = writeln!(
                s,
                "{:.12},{:.12},{:.12},{},{}",
                smp.center.x, smp.center.y, smp.r, smp.llc1_ok, smp.llc2_ok
            );
        }
        write_out(&path, &s)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_horseshoe(
    depth: usize,
    k_min: u32,
    k_max: u32,
    csv: Option<PathBuf>,
    svg: Option<PathBuf>,
) -> Result<(), CliError> {
    if k_min > k_max {
        return Err(CliError::Input(format!("k range {k_min}..{k_max} is empty")));
    }
    let ks: Vec<u32> = (k_min..=k_max).collect();
    let table =
        horseshoe_area_experiment(depth, &ks).map_err(|e| CliError::Invalid(e.to_string()))?;
    println!("  k          r           area     area/r^2");
    for row in &table.rows {
        println!(
            "{:>3} {:>12.8} {:>14.10} {:>10.6}",
            row.k, row.r, row.area, row.ratio
        );
    }
    println!(
        "fit: ratio = {:.4} * k + {:.4}, R^2 = {:.6}",
        table.slope, table.intercept, table.r_squared
    );
    if let Some(path) = csv {
        let mut s = String::from("k,r,area,ratio\n");
        for row in &table.rows {
            let _ = writeln!(s, "{},{:.12},{:.12},{:.12}", row.k, row.r, row.area, row.ratio);
        }
        write_out(&path, &s)?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = svg {
        let pts: Vec<(f64, f64)> = table.rows.iter().map(|r| (r.k as f64, r.ratio)).collect();
        write_out(
            &path,
            &render_plot_svg(&pts, "log2(1/r)", "area / r^2"),
        )?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn render_ball_svg(scheme: &PairingScheme, pieces: &[crate::balls::BallPiece]) -> String {
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for poly in &scheme.domain.polygons {
        let (a, b) = poly.bbox();
        lo = Point2::new(lo.x.min(a.x), lo.y.min(a.y));
        hi = Point2::new(hi.x.max(b.x), hi.y.max(b.y));
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
    let scale = 720.0 / span;
    let margin = 40.0;
    let tx = |x: f64| margin + (x - lo.x) * scale;
    let ty = |y: f64| margin + (hi.y - y) * scale;
    let w = margin * 2.0 + (hi.x - lo.x) * scale;
    let h = margin * 2.0 + (hi.y - lo.y) * scale;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.1} {h:.1}\">\n"
    );
    for p in pieces {
        let c = p.center;
        let _ = writeln!(
            s,
            "  <rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
             fill=\"#1f77b4\" fill-opacity=\"0.30\" stroke=\"#1f77b4\" stroke-width=\"0.5\"/>",
            tx(c.x - p.radius),
            ty(c.y + p.radius),
            2.0 * p.radius * scale,
            2.0 * p.radius * scale
        );
    }
    let palette = ["#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];
    for (i, p) in scheme.expanded.iter().enumerate() {
        let color = palette[i % palette.len()];
        for (poly, start) in [(p.a_poly, p.a_start), (p.b_poly, p.b_start)] {
            let pg = &scheme.domain.polygons[poly];
            let steps = 16;
            let pts: Vec<String> = (0..=steps)
                .map(|k| {
                    let q = pg.arc_length_point(start + p.len * k as f64 / steps as f64);
                    format!("{:.2},{:.2}", tx(q.x), ty(q.y))
                })
                .collect();
            let _ = writeln!(
                s,
                "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"3\"/>",
                pts.join(" ")
            );
        }
    }
    for poly in &scheme.domain.polygons {
        let pts: Vec<String> = poly
            .vertices()
            .iter()
            .map(|v| format!("{:.2},{:.2}", tx(v.x), ty(v.y)))
            .collect();
        let _ = writeln!(
            s,
            "  <polygon points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>",
            pts.join(" ")
        );
    }
    s.push_str("</svg>\n");
    s
}

fn render_plot_svg(pts: &[(f64, f64)], xlabel: &str, ylabel: &str) -> String {
    let (w, h, m) = (640.0, 420.0, 50.0);
    let (x0, x1) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
            (a.min(p.0), b.max(p.0))
        });
    let (y0, y1) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
            (a.min(p.1), b.max(p.1))
        });
    let sx = (w - 2.0 * m) / (x1 - x0).max(1e-12);
    let sy = (h - 2.0 * m) / (y1 - y0).max(1e-12);
    let tx = |x: f64| m + (x - x0) * sx;
    let ty = |y: f64| h - m - (y - y0) * sy;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    );
    let _ = writeln!(
        s,
        "  <line x1=\"{m}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>",
        h - m,
        w - m,
        h - m
    );
    let _ = writeln!(
        s,
        "  <line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{:.1}\" stroke=\"black\"/>",
        h - m
    );
    let line: Vec<String> = pts
        .iter()
        .map(|p| format!("{:.2},{:.2}", tx(p.0), ty(p.1)))
        .collect();
    let _ = writeln!(
        s,
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>",
        line.join(" ")
    );
    for p in pts {
        let _ = writeln!(
            s,
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"#d62728\"/>",
            tx(p.0),
            ty(p.1)
        );
    }
    let _ = writeln!(
        s,
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"14\">{xlabel}</text>",
        w / 2.0 - 30.0,
        h - 12.0
    );
    let _ = writeln!(
        s,
        "  <text x=\"12\" y=\"{:.1}\" font-size=\"14\" transform=\"rotate(-90 16 {:.1})\">{ylabel}</text>",
        h / 2.0,
        h / 2.0
    );
    s.push_str("</svg>\n");
    s
}

/// Names accepted as builtin schemes, for `--help` and error text.
pub fn builtin_list() -> String {
    BUILTIN_NAMES.join(", ")
}
