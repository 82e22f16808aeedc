//! End-to-end runs of the `pleat` binary: output shapes, exit codes,
//! determinism of CSV output.

use std::io::Write;
use std::process::{Command, Output};

fn pleat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pleat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn validate_builtins() {
    let out = pleat(&["validate", "torus"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("full: yes, plain: no, singular classes: 0"), "{text}");
    assert!(text.contains("linked witness"), "{text}");

    let out = pleat(&["validate", "example-1.3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(
        stdout(&out).contains("full: yes, plain: yes, singular classes: 1"),
        "{}",
        stdout(&out)
    );

    let out = pleat(&["validate", "four-rectangle", "--merge"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("plain: yes"), "{}", stdout(&out));
}

#[test]
fn validate_reads_files_and_reports_errors() {
    let dir = tempfile::tempdir().unwrap();

    // A builtin written to disk validates identically through the file path.
    let path = dir.path().join("torus.json");
    std::fs::write(&path, include_str!("../builtins/torus.json")).unwrap();
    let out = pleat(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!stdout(&out).contains("(builtin)"));

    // Unreadable input.
    let out = pleat(&["validate", "no-such-scheme.json"]);
    assert_eq!(out.status.code(), Some(1));

    // Parse error.
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(pleat(&["validate", bad.to_str().unwrap()]).status.code(), Some(1));

    // Well-formed JSON, invalid scheme.
    let invalid = dir.path().join("invalid.json");
    let mut f = std::fs::File::create(&invalid).unwrap();
    write!(
        f,
        r#"{{"format": 1,
            "polygons": [{{"id": "p", "vertices": [[0,0],[1,0],[1,1],[0,1]]}}],
            "pairings": [{{"type": "segment",
                "a": {{"polygon": "p", "start": 0.0, "len": 1.0}},
                "b": {{"polygon": "missing", "start": 2.0}}}}]}}"#
    )
    .unwrap();
    let out = pleat(&["validate", invalid.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing"));
}

#[test]
fn distance_command() {
    let out = pleat(&["distance", "torus", "--from", "0.1,0.5", "--to", "0.9,0.5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("d = 0.2000"), "{}", stdout(&out));

    // Identified fold points are at distance zero.
    let out = pleat(&[
        "distance",
        "example-1.3",
        "--from",
        "1.0,0.3",
        "--to",
        "1.0,0.7",
        "--path",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("d = 0.0000"), "{text}");
    assert!(text.contains("jump"), "{text}");

    // Out-of-domain query point.
    let out = pleat(&["distance", "torus", "--from", "3,3", "--to", "0.5,0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ball_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = pleat(&[
            "ball",
            "example-1.3",
            "--center",
            "0,0.25",
            "--radius",
            "0.1",
            "--csv",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let ca = std::fs::read(&a).unwrap();
    assert_eq!(ca, std::fs::read(&b).unwrap());
    let text = String::from_utf8(ca).unwrap();
    assert!(text.starts_with("piece,polygon,cx,cy,radius,provenance\n"));
    assert!(text.lines().count() > 3);
}

#[test]
fn horseshoe_svg_output() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("fit.svg");
    let out = pleat(&[
        "horseshoe",
        "--depth",
        "16",
        "--k-min",
        "3",
        "--k-max",
        "6",
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("fit: ratio ="));
    let body = std::fs::read_to_string(&svg).unwrap();
    assert!(body.starts_with("<svg"));
    assert!(body.contains("<polyline"));
}
