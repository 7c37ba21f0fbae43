use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use graff::cli::FlatDocument;
use graff::{equal_flats, unembed};
use nalgebra::DMatrix;

fn graff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graff"))
        .args(args)
        .env_remove("GRAFF_TOL")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const X_AXIS: &str = r#"{"n": 2, "k": 1, "A": [[1, 0]], "b": [0, 0]}"#;
const Y_ONE: &str = r#"{"n": 2, "k": 1, "A": [[1, 0]], "b": [0, 1]}"#;

#[test]
fn convert_to_stiefel() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(dir.path(), "x.json", X_AXIS);
    let out = graff(&["convert", s(&x), "--to", "stiefel"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "[[1.0,0.0],[0.0,0.0],[0.0,1.0]]\n");
}

#[test]
fn convert_rejects_degenerate_bases() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"n": 3, "k": 2, "A": [[1, 0, 0], [2, 0, 0]], "b": [0, 0, 0]}"#,
    );
    let out = graff(&["convert", s(&bad), "--to", "stiefel"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("RankDeficient"));
    let garbled = write(dir.path(), "garbled.json", "{\"n\": 3");
    assert_eq!(
        graff(&["convert", s(&garbled), "--to", "projection"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn projection_output_reconstructs_the_flat() {
    let dir = tempfile::tempdir().unwrap();
    let doc = r#"{"n": 3, "k": 1, "A": [[1, 2, 2]], "b": [3, -1, 0.5]}"#;
    let f = write(dir.path(), "f.json", doc);
    let out = graff(&["convert", s(&f), "--to", "projection"]);
    assert!(out.status.success());
    let rows: Vec<Vec<f64>> = serde_json::from_str(stdout(&out).trim()).unwrap();
    let p = DMatrix::from_row_iterator(4, 4, rows.into_iter().flatten());
    // The column space of P is the embedded plane.
    let eig = p.symmetric_eigen();
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let frame = DMatrix::from_fn(4, 2, |i, j| eig.eigenvectors[(i, order[j])]);
    let rebuilt = unembed(&frame).unwrap();
    let original = serde_json::from_str::<FlatDocument>(doc)
        .unwrap()
        .to_flat()
        .unwrap();
    assert!(equal_flats(&rebuilt, &original, 1e-10).unwrap());
}

#[test]
fn distances() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(dir.path(), "x.json", X_AXIS);
    let y = write(dir.path(), "y.json", Y_ONE);
    let p = write(
        dir.path(),
        "p.json",
        r#"{"n": 2, "k": 0, "A": [], "b": [0, 1]}"#,
    );
    let out = graff(&["distance", s(&x), s(&y), "--kind", "grassmann"]);
    assert_eq!(stdout(&out), "0.7853981633974483\n");
    let out = graff(&["distance", s(&p), s(&x)]);
    let value: f64 = stdout(&out).trim().parse().unwrap();
    assert!((value - std::f64::consts::FRAC_PI_4).abs() <= 1e-12);
    let out = graff(&["distance", s(&x), s(&y), "--verbose"]);
    assert_eq!(stdout(&out).lines().count(), 2);

    let a = write(
        dir.path(),
        "a.json",
        r#"{"n": 1, "k": 0, "A": [], "b": [1]}"#,
    );
    let b = write(
        dir.path(),
        "b.json",
        r#"{"n": 1, "k": 0, "A": [], "b": [-1]}"#,
    );
    assert_eq!(
        stdout(&graff(&["distance", s(&a), s(&b), "--kind", "martin"])),
        "inf\n"
    );

    let out = graff(&["distance", s(&p), s(&x), "--infinite", "--kind", "asimov"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("UnsupportedKind"));
    let z = write(
        dir.path(),
        "z.json",
        r#"{"n": 3, "k": 0, "A": [], "b": [0, 0, 0]}"#,
    );
    let out = graff(&["distance", s(&z), s(&x)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("DimensionError"));
}

#[test]
fn geodesic_command() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(dir.path(), "x.json", X_AXIS);
    let y = write(dir.path(), "y.json", Y_ONE);
    let out = graff(&["geodesic", s(&x), s(&y), "--t", "0,0.5,1"]);
    assert!(out.status.success());
    let docs: Vec<FlatDocument> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(docs.len(), 3);
    let mid = docs[1].to_flat().unwrap();
    assert!((mid.offset()[1] - (std::f64::consts::PI / 8.0).tan()).abs() <= 1e-10);
    let start = docs[0].to_flat().unwrap();
    let x_flat = serde_json::from_str::<FlatDocument>(X_AXIS)
        .unwrap()
        .to_flat()
        .unwrap();
    assert!(equal_flats(&start, &x_flat, 1e-8).unwrap());

    let a = write(
        dir.path(),
        "a.json",
        r#"{"n": 1, "k": 0, "A": [], "b": [1]}"#,
    );
    let b = write(
        dir.path(),
        "b.json",
        r#"{"n": 1, "k": 0, "A": [], "b": [-1]}"#,
    );
    let out = graff(&["geodesic", s(&a), s(&b), "--t", "0.5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("SingularPair"));
}

#[test]
fn invariant_commands() {
    assert_eq!(stdout(&graff(&["invariant", "dim", "1", "3"])), "4\n");
    assert_eq!(stdout(&graff(&["invariant", "betti", "2", "4"])), "3\n");
    assert_eq!(
        stdout(&graff(&["invariant", "homotopy", "1", "2", "1"])),
        "Z\n"
    );
    assert_eq!(
        stdout(&graff(&["invariant", "homotopy", "3", "inf", "4"])),
        "Z\n"
    );
    let volume: f64 = stdout(&graff(&["invariant", "volume", "1", "2"]))
        .trim()
        .parse()
        .unwrap();
    assert!((volume - std::f64::consts::PI).abs() <= 1e-12);
    assert_eq!(
        stdout(&graff(&["invariant", "schubert-dim", "2", "3"])),
        "3\n"
    );
    assert_eq!(
        stdout(&graff(&["invariant", "psi-minus", "2", "3", "5"])),
        "3\n"
    );
    let out = graff(&["invariant", "schubert-dim", "3", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("InvalidFlag"));
}

#[test]
fn sampling_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let params = write(dir.path(), "u.json", r#"{"k": 1, "n": 3}"#);
    let run = |seed: &str| {
        stdout(&graff(&[
            "sample",
            "--dist",
            "uniform",
            "--params",
            s(&params),
            "--seed",
            seed,
            "--count",
            "600",
        ]))
    };
    let first = run("17");
    assert_eq!(first, run("17"));
    assert_ne!(first, run("18"));
    assert_eq!(first.lines().count(), 600);
    for line in first.lines().take(5) {
        let doc: FlatDocument = serde_json::from_str(line).unwrap();
        assert_eq!((doc.n, doc.k), (3, 1));
        doc.to_flat().unwrap();
    }

    let lg = write(
        dir.path(),
        "lg.json",
        r#"{"k": 1, "S": [[1, 0, 0], [0, 0, 0], [0, 0, -1]], "sigma2": 0.5, "burn_in": 200}"#,
    );
    let a = graff(&[
        "sample",
        "--dist",
        "langevin-gaussian",
        "--params",
        s(&lg),
        "--seed",
        "3",
        "--count",
        "5",
    ]);
    assert!(a.status.success(), "{}", stderr(&a));
    let b = graff(&[
        "sample",
        "--dist",
        "langevin-gaussian",
        "--params",
        s(&lg),
        "--seed",
        "3",
        "--count",
        "5",
    ]);
    assert_eq!(a.stdout, b.stdout);

    let out = graff(&[
        "sample",
        "--dist",
        "uniform",
        "--params",
        "/nonexistent/params.json",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fit_commands() {
    let dir = tempfile::tempdir().unwrap();
    let line = write(dir.path(), "line.csv", "x,y\n0,1\n1,1\n2,1\n");
    let out = graff(&["fit", "--method", "flat", "--k", "1", s(&line)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let fitted: FlatDocument = serde_json::from_str(stdout(&out).trim()).unwrap();
    let f = fitted.to_flat().unwrap();
    assert!((f.offset()[1] - 1.0).abs() <= 1e-10 && f.offset()[0].abs() <= 1e-10);

    let reg = write(dir.path(), "reg.csv", "0,0\n1,1\n2,1\n");
    let out = graff(&["fit", "--method", "regression", s(&reg)]);
    let lines: Vec<String> = stdout(&out).lines().map(str::to_owned).collect();
    let coef: serde_json::Value = serde_json::from_str(&lines[1]).unwrap();
    assert!((coef["coefficients"][0].as_f64().unwrap() - 0.5).abs() <= 1e-12);
    assert!((coef["intercept"].as_f64().unwrap() - 1.0 / 6.0).abs() <= 1e-12);

    let svm = write(dir.path(), "svm.csv", "0,0,-1\n2,0,1\n");
    let out = graff(&["fit", "--method", "svm", s(&svm)]);
    let lines: Vec<String> = stdout(&out).lines().map(str::to_owned).collect();
    let w: serde_json::Value = serde_json::from_str(&lines[1]).unwrap();
    assert!((w["w"][0].as_f64().unwrap() - 1.0).abs() <= 1e-8);
    assert!((w["beta"].as_f64().unwrap() - 1.0).abs() <= 1e-8);

    let mixed = write(dir.path(), "mixed.csv", "0,-1\n1,1\n2,-1\n");
    let out = graff(&["fit", "--method", "svm", s(&mixed)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("NotSeparable"));

    let out = graff(&["fit", "--method", "flat", s(&line)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tolerance_flags() {
    let dir = tempfile::tempdir().unwrap();
    let nearly = write(
        dir.path(),
        "n.json",
        r#"{"n": 3, "k": 2, "A": [[1, 0, 0], [1, 1e-7, 0]], "b": [0, 0, 0]}"#,
    );
    assert!(graff(&["convert", s(&nearly), "--to", "stiefel"])
        .status
        .success());
    assert_eq!(
        graff(&["--tol", "1e-6", "convert", s(&nearly), "--to", "stiefel"])
            .status
            .code(),
        Some(2)
    );
    let with_env = Command::new(env!("CARGO_BIN_EXE_graff"))
        .args(["convert", s(&nearly), "--to", "stiefel"])
        .env("GRAFF_TOL", "1e-6")
        .output()
        .unwrap();
    assert_eq!(with_env.status.code(), Some(2));
    assert_eq!(
        graff(&["--tol", "-1", "invariant", "dim", "1", "3"])
            .status
            .code(),
        Some(2)
    );
}
