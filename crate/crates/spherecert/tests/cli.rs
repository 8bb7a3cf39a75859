use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const TWO_UNIT: &str = r#"{
  "input_dim": 2,
  "hidden": [{"weights": [[1, 0], [0, 1]], "biases": [0, 0]}],
  "output": {"weights": [1, 1], "bias": -1}
}"#;

fn spherecert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spherecert"))
        .args(args)
        .env_remove("SPHERECERT_SEED")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn certify_two_unit_net() {
    let dir = TempDir::new().unwrap();
    let net = write(dir.path(), "net.json", TWO_UNIT);
    let out = spherecert(&["certify", "--net", s(&net), "--x", "[1, 1]", "--r", "0.5"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc = json(&out);
    for key in ["bound_paper", "bound_sum_exp", "bound_exact_cap"] {
        assert_eq!(doc[key], 1.0, "{key}");
    }
    assert_eq!(doc["n"], 3);
    assert_eq!(doc["d"], 2);
    assert_eq!(doc["label"], 1);
    assert_eq!(doc["per_hyperplane"].as_array().unwrap().len(), 3);
    assert!(!out.stderr.is_empty());
}

#[test]
fn certify_reports_required_margin() {
    let dir = TempDir::new().unwrap();
    let net = write(dir.path(), "net.json", TWO_UNIT);
    let point = write(dir.path(), "x.json", "[1, 1]");
    let at = format!("@{}", s(&point));
    let out = spherecert(&[
        "certify",
        "--net",
        s(&net),
        "--x",
        &at,
        "--r",
        "0.5",
        "--epsilon",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    // sqrt(2 ln(3 / 0.5) / 2) · 0.5
    let want = 0.5 * (6.0f64).ln().sqrt();
    assert!((doc["required_margin"].as_f64().unwrap() - want).abs() < 1e-12);
    assert_eq!(doc["meets_epsilon"], true);
}

#[test]
fn certify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let net = write(dir.path(), "net.json", TWO_UNIT);

    let out = spherecert(&[
        "certify",
        "--net",
        s(&net),
        "--x",
        "[0.5, 0.5]",
        "--r",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["kind"], "on_boundary");
    assert!(err["error"].as_str().unwrap().contains("decision"));

    let out = spherecert(&["certify", "--net", s(&net), "--x", "[-1, 0]", "--r", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unit (0, 1)"));

    let missing = dir.path().join("nope.json");
    let out = spherecert(&[
        "certify",
        "--net",
        s(&missing),
        "--x",
        "[1, 1]",
        "--r",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["kind"], "io");

    let out = spherecert(&[
        "certify",
        "--net",
        s(&net),
        "--x",
        "[1, 1, 1]",
        "--r",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = spherecert(&["certify", "--net", s(&net), "--x", "[1, 1]", "--r", "-1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = spherecert(&["certify", "--net", s(&net)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn estimate_constant_network() {
    let dir = TempDir::new().unwrap();
    let net = write(
        dir.path(),
        "net.json",
        r#"{"input_dim": 3, "hidden": [], "output": {"weights": [0, 0, 0], "bias": 1}}"#,
    );
    let out = spherecert(&[
        "estimate",
        "--net",
        s(&net),
        "--x",
        "[1, 2, 3]",
        "--r",
        "4",
        "--n-samples",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["point_estimate"], 1.0);
    assert_eq!(doc["samples"], 1000);
    assert_eq!(doc["confidence"], 0.99);
    assert!(doc["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn estimate_validates_certificates() {
    let dir = TempDir::new().unwrap();
    let net = write(dir.path(), "net.json", TWO_UNIT);
    // x = (0.6, 0.7) at r = 0.5 reaches all three faces.
    let cert_path = dir.path().join("cert.json");
    let out = spherecert(&[
        "certify",
        "--net",
        s(&net),
        "--x",
        "[0.6, 0.7]",
        "--r",
        "0.5",
        "--out",
        s(&cert_path),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());

    let out = spherecert(&[
        "estimate",
        "--net",
        s(&net),
        "--cert",
        s(&cert_path),
        "--n-samples",
        "20000",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc = json(&out);
    assert_eq!(doc["validation"]["pass"], true);
    let truth = doc["point_estimate"].as_f64().unwrap();
    assert!(truth < 0.9, "{truth}");

    // Hand-edited certificate claiming certainty.
    let mut cert: Value = serde_json::from_slice(&std::fs::read(&cert_path).unwrap()).unwrap();
    cert["bound_exact_cap"] = 1.0.into();
    let bad = write(dir.path(), "bad.json", &cert.to_string());
    let out = spherecert(&[
        "estimate",
        "--net",
        s(&net),
        "--cert",
        s(&bad),
        "--n-samples",
        "20000",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["validation"]["pass"], false);

    // Mismatched radius is an input error.
    let out = spherecert(&[
        "estimate",
        "--net",
        s(&net),
        "--cert",
        s(&cert_path),
        "--r",
        "0.4",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn estimate_is_deterministic_and_seedable() {
    let dir = TempDir::new().unwrap();
    let net = write(dir.path(), "net.json", TWO_UNIT);
    let args = [
        "estimate",
        "--net",
        s(&net),
        "--x",
        "[0.6, 0.7]",
        "--r",
        "0.5",
        "--n-samples",
        "5000",
    ];
    let a = json(&spherecert(&args));
    let b = json(&spherecert(&args));
    assert_eq!(a["agreements"], b["agreements"]);
    assert_eq!(a["seed"], spherecert::cli::DEFAULT_SEED);

    let out = Command::new(env!("CARGO_BIN_EXE_spherecert"))
        .args(args)
        .env("SPHERECERT_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(json(&out)["seed"], 99);
}

#[test]
fn region_report() {
    let dir = TempDir::new().unwrap();
    let net = write(dir.path(), "net.json", TWO_UNIT);
    let out = spherecert(&["region", "--net", s(&net), "--x", "[-1, 0.5]"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["pattern"], serde_json::json!([[false, true]]));
    assert_eq!(doc["label"], 0);
    assert_eq!(doc["margin"], 0.5);
    assert_eq!(doc["decision"]["w"], serde_json::json!([0.0, 1.0]));
    assert_eq!(doc["units"][0]["a"], 1.0);
}

#[test]
fn sweep_csv() {
    let out = spherecert(&[
        "sweep",
        "--dims",
        "4,16,64,256",
        "--ratio",
        "0.3",
        "--n-samples",
        "20000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), spherecert::sweep::CSV_HEADER);
    let bounds: Vec<f64> = lines
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(bounds.len(), 4);
    assert!(bounds.windows(2).all(|w| w[1] > w[0]));

    let out = spherecert(&["sweep", "--dims", "", "--ratio", "0.3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn render2d_outputs() {
    let dir = TempDir::new().unwrap();
    let net = write(dir.path(), "net.json", TWO_UNIT);
    let img = dir.path().join("p.ppm");
    let args = [
        "render2d",
        "--net",
        s(&net),
        "--bbox",
        "-2,-2,2,2",
        "--res",
        "64",
        "--x",
        "[1, 1]",
        "--r",
        "0.5",
        "--out",
        s(&img),
    ];
    assert_eq!(spherecert(&args).status.code(), Some(0));
    let first = std::fs::read(&img).unwrap();
    assert!(first.starts_with(b"P6\n64 64\n255\n"));
    assert_eq!(spherecert(&args).status.code(), Some(0));
    assert_eq!(std::fs::read(&img).unwrap(), first);

    let net3 = write(
        dir.path(),
        "net3.json",
        r#"{"input_dim": 3, "hidden": [], "output": {"weights": [1, 0, 0], "bias": 0}}"#,
    );
    let out = spherecert(&["render2d", "--net", s(&net3), "--res", "8"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("input_dim = 2"));
}

#[test]
fn gen_networks() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = spherecert(&[
            "gen",
            "--input-dim",
            "64",
            "--widths",
            "32,16",
            "--seed",
            "7",
            "--out",
            s(path),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let net = spherecert::format::load_network(&bytes).unwrap();
    assert_eq!(net.total_units(), 49);
    assert_eq!(net.input_dim(), 64);

    let out = spherecert(&["gen", "--input-dim", "4", "--widths", "3,0"]);
    assert_eq!(out.status.code(), Some(1));
}
