use std::fs;
use std::path::Path;

use vnet::formats::{parse_curve_csv, Checkpoint, SuiteSummary};
use vnet::run_cli;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("vnet").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn list_shows_every_catalog_algebra() {
    let (code, out, _) = run(&["algebra", "list"]);
    assert_eq!(code, 0);
    let rows: Vec<Vec<&str>> = out
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().collect())
        .collect();
    assert_eq!(rows.len(), 11);
    let g = rows.iter().find(|r| r[0] == "G").unwrap();
    assert_eq!(&g[1..4], &["4", "degenerate", "3"]);
    let q = rows.iter().find(|r| r[0] == "Q").unwrap();
    assert_eq!(&q[2..5], &["non-degenerate", "-", "yes"]);
}

#[test]
fn check_reads_a_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("dual.json");
    fs::write(
        &file,
        r#"{"dim": 2, "constants": [[[1, 0], [0, 1]], [[0, 1], [0, 0]]], "name": "dual"}"#,
    )
    .unwrap();
    let (code, out, _) = run(&["algebra", "check", "--file", path(&file)]);
    assert_eq!(code, 0);
    assert!(out.contains("component 0 (e0): rank 1"), "{out}");
    assert!(out.contains("status: degenerate"));
    assert!(out.contains("singular components: 0"));

    fs::write(&file, "{\"dim\": 2,\n\"constants\": oops}").unwrap();
    let (code, _, err) = run(&["algebra", "check", "--file", path(&file)]);
    assert_eq!(code, 1);
    assert!(err.contains("line 2"), "{err}");

    let (code, _, err) = run(&[
        "algebra",
        "check",
        "--file",
        path(&dir.path().join("nope.json")),
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("nope.json"));
}

#[test]
fn show_prints_matrices_or_json() {
    let (code, out, _) = run(&["algebra", "show", "G"]);
    assert_eq!(code, 0);
    assert!(out.contains("B3:"));
    assert!(out.contains("identity: none"));
    let (code, out, _) = run(&["algebra", "show", "Q", "--json"]);
    assert_eq!(code, 0);
    let q = vnet::formats::parse_algebra(&out, "stdout").unwrap();
    assert_eq!(q, vnet::vnet_core::algebra::catalog("Q").unwrap());
    let (code, _, err) = run(&["algebra", "show", "Z"]);
    assert_eq!(code, 1);
    assert!(err.contains("HQ"), "{err}");
}

#[test]
fn lemma1_certificates() {
    let (code, out, _) = run(&[
        "algebra",
        "lemma1",
        "--algebra",
        "C",
        "--component",
        "0",
        "--coeffs",
        "0.5,-2",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("y0 = 0.5·1 + 2·i"), "{out}");
    assert!(out.contains("representable: yes"));
    let (code, out, _) = run(&[
        "algebra",
        "lemma1",
        "--algebra",
        "D",
        "--component",
        "0",
        "--coeffs",
        "0,1",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("residual: 1.000000e0"), "{out}");
    assert!(out.contains("representable: no"));
    let (code, _, _) = run(&[
        "algebra",
        "lemma1",
        "--algebra",
        "C",
        "--component",
        "0",
        "--coeffs",
        "1,2,3",
    ]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&[
        "algebra",
        "lemma1",
        "--algebra",
        "C",
        "--component",
        "0",
        "--coeffs",
        "1,x",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&["algebra", "list", "--bogus"]).0, 1);
    assert_eq!(run(&[]).0, 1);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("repro"));
}

#[test]
fn train_writes_curve_and_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let ck = dir.path().join("c.json");
    let args = [
        "train",
        "--algebra",
        "C",
        "--target",
        "quad2d",
        "--output-mode",
        "vector",
        "--hidden",
        "8",
        "--epochs",
        "5",
        "--samples",
        "64",
        "--batch",
        "16",
        "--lr",
        "0.01",
        "--seed",
        "3",
        "--out",
        path(&csv),
        "--checkpoint",
        path(&ck),
    ];
    let (code, out, err) = run(&args);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("final_mse"));
    let text = fs::read_to_string(&csv).unwrap();
    let curve = parse_curve_csv(&text).unwrap();
    assert_eq!(curve.len(), 5);
    let net = Checkpoint::load(&ck).unwrap().to_vmlp().unwrap();
    assert_eq!(net.n_hidden(), 8);

    // same seed, same bytes
    let (code, _, _) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(fs::read_to_string(&csv).unwrap(), text);
}

#[test]
fn train_baseline_and_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let ck = dir.path().join("r.json");
    let (code, _, err) = run(&[
        "train",
        "--algebra",
        "R",
        "--target",
        "quad4d",
        "--hidden",
        "4",
        "--epochs",
        "2",
        "--samples",
        "32",
        "--out",
        path(&csv),
        "--checkpoint",
        path(&ck),
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(
        Checkpoint::load(&ck).unwrap().to_dense().unwrap().inputs(),
        4
    );

    let (code, _, err) = run(&[
        "train",
        "--algebra",
        "A",
        "--output-mode",
        "vector",
        "--hidden",
        "4",
        "--epochs",
        "1",
        "--samples",
        "16",
        "--out",
        path(&csv),
    ]);
    assert_eq!(code, 0);
    assert!(err.contains("warning"), "{err}");
}

#[test]
fn train_argument_errors() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    for bad in [
        vec![
            "train",
            "--algebra",
            "C",
            "--target",
            "quad4d",
            "--out",
            path(&csv),
        ],
        vec![
            "train",
            "--algebra",
            "C",
            "--output-mode",
            "matrix",
            "--out",
            path(&csv),
        ],
        vec![
            "train",
            "--algebra",
            "C",
            "--hidden",
            "0",
            "--out",
            path(&csv),
        ],
        vec!["train", "--algebra", "C", "--lr", "-1", "--out", path(&csv)],
        vec![
            "train",
            "--algebra",
            "C",
            "--hidden",
            "many",
            "--out",
            path(&csv),
        ],
    ] {
        assert_eq!(run(&bad).0, 1, "{bad:?}");
    }
    assert!(!csv.exists());
}

#[test]
fn diverging_training_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    let (code, _, err) = run(&[
        "train",
        "--algebra",
        "Q",
        "--activation",
        "identity",
        "--hidden",
        "4",
        "--epochs",
        "50",
        "--samples",
        "32",
        "--lr",
        "1e300",
        "--out",
        path(&csv),
    ]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("epoch"), "{err}");
}

#[test]
fn repro_writes_curves_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, err) = run(&[
        "repro",
        "--suite",
        "2d-vector",
        "--seed",
        "7",
        "--out-dir",
        path(dir.path()),
        "--epochs",
        "2",
    ]);
    assert_eq!(code, 0, "{err}");
    let summary_path = Path::new(out.trim());
    let summary =
        SuiteSummary::parse(&fs::read_to_string(summary_path).unwrap(), "summary").unwrap();
    assert_eq!(summary.suite, "2d-vector");
    let names: Vec<&str> = summary.runs.iter().map(|r| r.algebra.as_str()).collect();
    assert_eq!(names, ["A", "C", "E", "R"]);
    for r in &summary.runs {
        assert_eq!(r.seed, 7);
        assert_eq!(r.output_mode, "vector");
        let curve =
            parse_curve_csv(&fs::read_to_string(dir.path().join(&r.curve_file)).unwrap()).unwrap();
        assert_eq!(curve.len(), 2);
        assert_eq!(curve[1].mse, r.final_mse);
        assert!(r.min_mse <= r.final_mse);
    }
    assert_eq!(
        run(&[
            "repro",
            "--suite",
            "3d-scalar",
            "--out-dir",
            path(dir.path())
        ])
        .0,
        1
    );
}
