//! The tight-horseshoe surface: a unit square whose whole boundary is
//! covered by consecutive folds (top and right halved once, left and bottom
//! by infinite fold runs accumulating at the origin), with every fold
//! endpoint in one identification class. Ball areas at that class grow like
//! r^2 * log(1/r), so the surface is not Ahlfors 2-regular; the experiment
//! here measures that growth.

use crate::balls::BallError;
use crate::geometry::{MultiPolygon, Point2, Polygon};
use crate::measure::{linear_fit, union_area, MeasureError};
use crate::scheme::{FoldChainSpec, PairingScheme, SchemeError, SegmentPairing, SeqSpec};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HorseshoeError {
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeomError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Ball(#[from] BallError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("depth {0} too small: need at least {1}")]
    DepthTooSmall(usize, usize),
    #[error(
        "truncation tail {tail:.3e} exceeds 1% of the ball area {area:.3e} at r = {r}; \
         rebuild with a larger depth"
    )]
    TailTooLarge { r: f64, tail: f64, area: f64 },
}

/// Builds the tight-horseshoe scheme truncated at `depth` folds per infinite
/// run. Top side folded in half at (0.5, 1); right side folded in half at
/// (1, 0.5); left and bottom sides covered by fold runs with lengths
/// 2^-(i+1), both accumulating at the origin.
pub fn build_tight_horseshoe(depth: usize) -> Result<PairingScheme, HorseshoeError> {
    if depth < 2 {
        return Err(HorseshoeError::DepthTooSmall(depth, 2));
    }
    let square = Polygon::new(
        "horseshoe",
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ],
    )?;
    let domain = MultiPolygon::new(vec![square])?;
    let halves = SeqSpec::Geometric {
        first: 0.25,
        ratio: 2.0,
    };
    let scheme = PairingScheme::build(
        domain,
        vec![
            // Top side folded in half.
            SegmentPairing {
                a_poly: 0,
                a_start: 2.0,
                b_poly: 0,
                b_start: 2.5,
                len: 0.5,
            },
            // Right side folded in half.
            SegmentPairing {
                a_poly: 0,
                a_start: 1.0,
                b_poly: 0,
                b_start: 1.5,
                len: 0.5,
            },
        ],
        vec![],
        vec![
            // Left side, from (0, 1) down towards the origin.
            FoldChainSpec {
                poly: 0,
                start: 3.0,
                lens: halves.clone(),
                depth,
                reverse: false,
            },
            // Bottom side, from (1, 0) back towards the origin.
            FoldChainSpec {
                poly: 0,
                start: 1.0,
                lens: halves,
                depth,
                reverse: true,
            },
        ],
    )?;
    debug_assert!(scheme.check_full().ok);
    Ok(scheme)
}

#[derive(Debug, Clone, Copy)]
pub struct ExperimentRow {
    pub k: u32,
    pub r: f64,
    pub area: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentTable {
    pub center: Point2,
    pub rows: Vec<ExperimentRow>,
    /// Least-squares fit of ratio against k = log2(1/r).
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Areas and `area / r^2` ratios of balls of radius `2^-k` around `center`,
/// with a linear fit of the ratio against `k`. Refuses when the truncation
/// tail could hide more than 1% of a measured area.
pub fn area_growth_fit(
    scheme: &PairingScheme,
    center: Point2,
    ks: &[u32],
) -> Result<ExperimentTable, HorseshoeError> {
    let mut rows = vec![];
    for &k in ks {
        let r = 0.5f64.powi(k as i32);
        // Tight staircase tolerance: the experiment's refusal threshold is
        // 1% of the area, so the reported undershoot bound must be small.
        let opts = crate::balls::BallOpts {
            stair_tol_factor: 2e-4,
            ..Default::default()
        };
        let dec = crate::balls::decompose_ball_with(scheme, center, r, &opts)?;
        let area = union_area(scheme, &dec.pieces).value;
        if dec.tail_area_bound > 0.01 * area {
            return Err(HorseshoeError::TailTooLarge {
                r,
                tail: dec.tail_area_bound,
                area,
            });
        }
        rows.push(ExperimentRow {
            k,
            r,
            area,
            ratio: area / (r * r),
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.k as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let (slope, intercept, r_squared) = linear_fit(&xs, &ys);
    Ok(ExperimentTable {
        center,
        rows,
        slope,
        intercept,
        r_squared,
    })
}

/// The non-regularity experiment: ball areas at the singular class of the
/// tight horseshoe for radii `2^-k`.
pub fn horseshoe_area_experiment(
    depth: usize,
    ks: &[u32],
) -> Result<ExperimentTable, HorseshoeError> {
    let max_k = ks.iter().copied().max().unwrap_or(2) as usize;
    if depth < max_k + 2 {
        return Err(HorseshoeError::DepthTooSmall(depth, max_k + 2));
    }
    let scheme = build_tight_horseshoe(depth)?;
    area_growth_fit(&scheme, Point2::new(0.0, 0.0), ks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::BoundaryPoint;

    #[test]
    fn construction_is_full_and_laid_out() {
        let h = build_tight_horseshoe(8).unwrap();
        let full = h.check_full();
        assert!(full.ok, "{full:?}");
        // First left-side fold: length 1/4 starting at (0, 1).
        assert!(h.expanded.iter().any(|p| p.a_poly == 0
            && (p.a_start - 3.0).abs() < 1e-12
            && (p.b_start - 3.25).abs() < 1e-12
            && (p.len - 0.25).abs() < 1e-12));
        assert!(build_tight_horseshoe(1).is_err());
    }

    #[test]
    fn fold_endpoints_form_one_singular_class() {
        let h = build_tight_horseshoe(8).unwrap();
        // The origin is the accumulation of both fold runs.
        assert!(h.is_singular_point(BoundaryPoint { poly: 0, s: 0.0 }));
        let cls = h.classify_point(BoundaryPoint { poly: 0, s: 2.0 });
        let has = |s: f64| cls.members.iter().any(|m| (m.s - s).abs() < 1e-9);
        // Three corners reachable through expanded folds (the origin itself
        // sits in the gap left by the depth truncation)...
        for s in [1.0, 2.0, 3.0] {
            assert!(has(s), "missing corner at arc {s}, class {:?}", cls.members);
        }
        // ... and the fold junctions on the left and bottom sides.
        for s in [3.5, 3.75, 0.5, 0.25] {
            assert!(has(s), "missing junction at arc {s}");
        }
    }

    #[test]
    fn ratio_grows_linearly_in_log_inverse_radius() {
        let ks: Vec<u32> = (3..=8).collect();
        let t = horseshoe_area_experiment(16, &ks).unwrap();
        for w in t.rows.windows(2) {
            assert!(
                w[1].ratio > w[0].ratio + 1e-9,
                "ratio not increasing: {:?}",
                t.rows
            );
        }
        assert!(t.slope > 0.0, "slope {}", t.slope);
        assert!(t.r_squared >= 0.99, "R^2 {}", t.r_squared);
    }

    #[test]
    fn shallow_depth_is_refused() {
        assert!(matches!(
            horseshoe_area_experiment(6, &[3, 4, 5, 6, 7, 8]),
            Err(HorseshoeError::DepthTooSmall(..))
        ));
    }
}
