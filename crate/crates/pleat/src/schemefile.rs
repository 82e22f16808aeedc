//! On-disk JSON description of a pairing scheme, plus a few builtin schemes
//! embedded in the binary.
//!
//! The format is versioned (`"format": 1`) and keeps geometric sequences
//! symbolic, so an infinite fold run is stored as `first`/`ratio` rather than
//! as a truncated list of lengths.

use crate::geometry::{Metric, MultiPolygon, Point2, Polygon};
use crate::scheme::{FoldChainSpec, PairingScheme, SchemeError, SegmentPairing, SeqSpec, TypeWSpec};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SchemeFileError {
    #[error("bad JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0} (this build reads version {FORMAT_VERSION})")]
    Format(u32),
    #[error("duplicate polygon id `{0}`")]
    DuplicateId(String),
    #[error("pairing {0} refers to unknown polygon `{1}`")]
    UnknownPolygon(usize, String),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeomError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeFile {
    pub format: u32,
    #[serde(default)]
    pub metric: Metric,
    pub polygons: Vec<PolygonFile>,
    pub pairings: Vec<PairingFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Seeds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolygonFile {
    pub id: String,
    pub vertices: Vec<[f64; 2]>,
}

/// The `a` side of a segment pairing carries the common length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SideA {
    pub polygon: String,
    pub start: f64,
    pub len: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SideB {
    pub polygon: String,
    pub start: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PairingFile {
    /// A single arc-length-reversing identification of two boundary segments.
    Segment { a: SideA, b: SideB },
    /// Two runs of folds marching toward a shared accumulation point on one
    /// side, expanded to `depth` folds per run when a run is infinite.
    W {
        polygon: String,
        side_start: f64,
        side_len: f64,
        a: SeqFile,
        b: SeqFile,
        depth: usize,
    },
    /// Consecutive folds of lengths `lens` starting at `start` and marching
    /// forward (or backward when `reverse`) along the boundary.
    FoldChain {
        polygon: String,
        start: f64,
        lens: SeqFile,
        depth: usize,
        #[serde(default)]
        reverse: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SeqFile {
    Geometric { first: f64, ratio: f64 },
    List { values: Vec<f64> },
}

impl From<SeqFile> for SeqSpec {
    fn from(s: SeqFile) -> SeqSpec {
        match s {
            SeqFile::Geometric { first, ratio } => SeqSpec::Geometric { first, ratio },
            SeqFile::List { values } => SeqSpec::List(values),
        }
    }
}

impl From<&SeqSpec> for SeqFile {
    fn from(s: &SeqSpec) -> SeqFile {
        match s {
            SeqSpec::Geometric { first, ratio } => SeqFile::Geometric {
                first: *first,
                ratio: *ratio,
            },
            SeqSpec::List(values) => SeqFile::List {
                values: values.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Seeds {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
}

impl SchemeFile {
    pub fn from_json(text: &str) -> Result<SchemeFile, SchemeFileError> {
        let file: SchemeFile = serde_json::from_str(text)?;
        if file.format != FORMAT_VERSION {
            return Err(SchemeFileError::Format(file.format));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        // serde_json prints f64 with enough digits to round-trip exactly.
        serde_json::to_string_pretty(self).expect("scheme files always serialize")
    }

    /// Builds the runtime scheme this file describes.
    pub fn to_scheme(&self) -> Result<PairingScheme, SchemeFileError> {
        let mut polys = vec![];
        for p in &self.polygons {
            if polys.iter().any(|q: &Polygon| q.id == p.id) {
                return Err(SchemeFileError::DuplicateId(p.id.clone()));
            }
            let verts = p.vertices.iter().map(|&[x, y]| Point2::new(x, y)).collect();
            polys.push(Polygon::new(p.id.clone(), verts)?);
        }
        let domain = MultiPolygon::new(polys)?;
        let index = |i: usize, id: &str| {
            domain
                .index_of(id)
                .ok_or_else(|| SchemeFileError::UnknownPolygon(i, id.to_string()))
        };
        let mut basic = vec![];
        let mut w_specs = vec![];
        let mut chains = vec![];
        for (i, pairing) in self.pairings.iter().enumerate() {
            match pairing {
                PairingFile::Segment { a, b } => basic.push(SegmentPairing {
                    a_poly: index(i, &a.polygon)?,
                    a_start: a.start,
                    b_poly: index(i, &b.polygon)?,
                    b_start: b.start,
                    len: a.len,
                }),
                PairingFile::W {
                    polygon,
                    side_start,
                    side_len,
                    a,
                    b,
                    depth,
                } => w_specs.push(TypeWSpec {
                    poly: index(i, polygon)?,
                    side_start: *side_start,
                    side_len: *side_len,
                    a: a.clone().into(),
                    b: b.clone().into(),
                    depth: *depth,
                }),
                PairingFile::FoldChain {
                    polygon,
                    start,
                    lens,
                    depth,
                    reverse,
                } => chains.push(FoldChainSpec {
                    poly: index(i, polygon)?,
                    start: *start,
                    lens: lens.clone().into(),
                    depth: *depth,
                    reverse: *reverse,
                }),
            }
        }
        Ok(PairingScheme::build(domain, basic, w_specs, chains)?)
    }

    /// Reconstructs a file from a runtime scheme (specs, not their expansions).
    pub fn from_scheme(scheme: &PairingScheme, metric: Metric) -> SchemeFile {
        let id = |i: usize| scheme.domain.polygons[i].id.clone();
        let mut pairings = vec![];
        for p in &scheme.basic {
            pairings.push(PairingFile::Segment {
                a: SideA {
                    polygon: id(p.a_poly),
                    start: p.a_start,
                    len: p.len,
                },
                b: SideB {
                    polygon: id(p.b_poly),
                    start: p.b_start,
                },
            });
        }
        for w in &scheme.w_specs {
            pairings.push(PairingFile::W {
                polygon: id(w.poly),
                side_start: w.side_start,
                side_len: w.side_len,
                a: (&w.a).into(),
                b: (&w.b).into(),
                depth: w.depth,
            });
        }
        for c in &scheme.chains {
            pairings.push(PairingFile::FoldChain {
                polygon: id(c.poly),
                start: c.start,
                lens: (&c.lens).into(),
                depth: c.depth,
                reverse: c.reverse,
            });
        }
        SchemeFile {
            format: FORMAT_VERSION,
            metric,
            polygons: scheme
                .domain
                .polygons
                .iter()
                .map(|p| PolygonFile {
                    id: p.id.clone(),
                    vertices: p.vertices().iter().map(|v| [v.x, v.y]).collect(),
                })
                .collect(),
            pairings,
            seeds: None,
            tolerances: None,
        }
    }
}

pub const BUILTIN_NAMES: [&str; 4] = ["torus", "example-1.3", "tight-horseshoe", "four-rectangle"];

/// The raw JSON of a builtin scheme, if `name` is one of [`BUILTIN_NAMES`].
pub fn builtin_json(name: &str) -> Option<&'static str> {
    match name {
        "torus" => Some(include_str!("../builtins/torus.json")),
        "example-1.3" => Some(include_str!("../builtins/example-1.3.json")),
        "tight-horseshoe" => Some(include_str!("../builtins/tight-horseshoe.json")),
        "four-rectangle" => Some(include_str!("../builtins/four-rectangle.json")),
        _ => None,
    }
}

pub fn builtin(name: &str) -> Option<SchemeFile> {
    builtin_json(name).map(|text| SchemeFile::from_json(text).expect("builtin schemes are valid"))
}

/// Number of distinct identification classes among the scheme's singular
/// points (several accumulation points may share one class).
pub fn singular_class_count(scheme: &PairingScheme) -> usize {
    let mut seen: Vec<crate::scheme::BoundaryPoint> = vec![];
    let mut count = 0;
    for &p in &scheme.singular_points {
        if seen
            .iter()
            .any(|&q| q.poly == p.poly && (q.s - p.s).abs() < 1e-9)
        {
            continue;
        }
        count += 1;
        let (members, _) = scheme.identify(p);
        seen.extend(members);
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse_and_round_trip() {
        for name in BUILTIN_NAMES {
            let file = builtin(name).unwrap();
            let again = SchemeFile::from_json(&file.to_json()).unwrap();
            assert_eq!(file, again, "round trip changed `{name}`");
            file.to_scheme().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(builtin("no-such-scheme").is_none());
    }

    #[test]
    fn scheme_to_file_round_trips() {
        for name in BUILTIN_NAMES {
            let file = builtin(name).unwrap();
            let scheme = file.to_scheme().unwrap();
            let back = SchemeFile::from_scheme(&scheme, file.metric);
            assert_eq!(file.polygons, back.polygons, "{name}");
            assert_eq!(file.pairings, back.pairings, "{name}");
        }
    }

    #[test]
    fn builtin_fullness_and_linking() {
        let torus = builtin("torus").unwrap().to_scheme().unwrap();
        assert!(torus.check_full().ok);
        // The two torus gluings cross on the boundary circle.
        assert!(!torus.check_unlinked(false).plain);

        let ex = builtin("example-1.3").unwrap().to_scheme().unwrap();
        assert!(ex.check_full().ok);
        assert!(ex.check_unlinked(false).plain);
        assert_eq!(singular_class_count(&ex), 1);

        let hs = builtin("tight-horseshoe").unwrap().to_scheme().unwrap();
        assert!(hs.check_full().ok);
        assert_eq!(singular_class_count(&hs), 1);

        let four = builtin("four-rectangle").unwrap().to_scheme().unwrap();
        assert!(four.check_full().ok);
        assert!(!four.check_unlinked(false).plain);
        assert!(four.check_unlinked(true).plain);
    }

    #[test]
    fn diagnostics_name_the_problem() {
        let missing = r#"{
            "format": 1,
            "polygons": [{"id": "p", "vertices": [[0,0],[1,0],[1,1],[0,1]]}],
            "pairings": [{"type": "segment",
                "a": {"polygon": "p", "start": 0.0, "len": 1.0},
                "b": {"polygon": "q", "start": 2.0}}]
        }"#;
        let err = SchemeFile::from_json(missing).unwrap().to_scheme().unwrap_err();
        assert!(err.to_string().contains('q'), "{err}");

        assert!(matches!(
            SchemeFile::from_json(r#"{"format": 7, "polygons": [], "pairings": []}"#),
            Err(SchemeFileError::Format(7))
        ));
        assert!(SchemeFile::from_json("{ not json").is_err());
    }
}
