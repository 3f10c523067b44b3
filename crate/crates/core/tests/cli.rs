use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hullmetry"));
    c.env_remove("HULLMETRY_SEED");
    c
}

fn suite(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_suite(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("suite.json");
    std::fs::write(&p, body).unwrap();
    p
}

const MC_SUITE: &str = r#"{"name": "mc", "scenarios": [
    {"id": "pair", "kind": "cloud", "fixture": "e1_e2", "checks": ["mm_two_sided"], "params": {"trials": 500}}
]}"#;

fn esup(dir: &Path) -> f64 {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("results.json")).unwrap()).unwrap();
    v["records"].as_array().unwrap().iter().find(|r| r["scenario"] == "pair").unwrap()["constants"]["esup"]
        .as_f64()
        .unwrap()
}

#[test]
fn bundled_suite_passes_and_writes_reports() {
    let out = tempfile::tempdir().unwrap();
    let run = bin().args(["run"]).arg(suite("suites/bundled.json")).arg("--out").arg(out.path()).output().unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    for f in ["results.json", "results.csv", "chaining.csv", "timings.json", "timings.csv", "plots/gamma_vs_size.csv"] {
        assert!(out.path().join(f).exists(), "missing {f}");
    }
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out.path().join("results.json")).unwrap()).unwrap();
    assert_eq!(v["all_hold"], true);
    let records = v["records"].as_array().unwrap();
    // Sorted by scenario, then check in declaration order; runtime lives elsewhere.
    const ORDER: [&str; 8] =
        ["volume_xcheck", "ratio_poly", "revbm", "convexify", "cover_ratio", "gamma_hull", "mm_two_sided", "l_existence"];
    let keys: Vec<(String, usize)> = records
        .iter()
        .map(|r| {
            let check = r["check"].as_str().unwrap();
            (r["scenario"].as_str().unwrap().into(), ORDER.iter().position(|c| *c == check).unwrap())
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(!std::fs::read_to_string(out.path().join("results.json")).unwrap().contains("runtime"));
    // Each record names the constants of its statement.
    for r in records {
        let c = &r["constants"];
        match r["check"].as_str().unwrap() {
            "gamma_hull" => assert!(c.get("L").is_some() && (c.get("R").is_some() || c.get("vacuous").is_some())),
            "revbm" => assert!(c.get("C1").is_some() && c.get("beta_A").is_some() && c.get("beta_B").is_some()),
            "mm_two_sided" if r["scenario"] != "_suite" => assert!(c.get("L_hat").is_some()),
            "cover_ratio" => assert!(c.get("n_hull_greedy").is_some()),
            _ => {}
        }
    }
}

#[test]
fn seed_flag_beats_environment() {
    let dir = tempfile::tempdir().unwrap();
    let s = write_suite(dir.path(), MC_SUITE);
    let run = |out: &str, flag: Option<&str>, env: Option<&str>| {
        let mut c = bin();
        c.args(["run"]).arg(&s).arg("--out").arg(dir.path().join(out));
        if let Some(f) = flag {
            c.args(["--seed", f]);
        }
        if let Some(e) = env {
            c.env("HULLMETRY_SEED", e);
        }
        assert_eq!(c.status().unwrap().code(), Some(0));
        esup(&dir.path().join(out))
    };
    let a = run("a", Some("5"), None);
    let b = run("b", None, Some("5"));
    let c = run("c", Some("5"), Some("6"));
    let d = run("d", None, Some("6"));
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_ne!(a, d);
}

#[test]
fn failing_record_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let s = write_suite(
        dir.path(),
        r#"{"scenarios": [{"id": "p", "kind": "profile", "payload": {"chi": 2, "psi": -2.5, "delta": 1}, "checks": ["l_existence"]}]}"#,
    );
    let run = bin().args(["run"]).arg(&s).arg("--out").arg(dir.path().join("o")).output().unwrap();
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("FAILED p l_existence"));
    let csv = std::fs::read_to_string(dir.path().join("o/results.csv")).unwrap();
    assert!(csv.lines().next().unwrap().ends_with(",error"));
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = [
        "{not json",
        r#"{"scenarios": [{"id": "a", "kind": "cloud", "fixture": "triangle", "checks": ["volume_xcheck"]}]}"#,
        r#"{"scenarios": [{"id": "a", "kind": "cloud", "checks": []}]}"#,
        r#"{"scenarios": [{"id": "a", "kind": "cloud", "fixture": "nope", "checks": []}]}"#,
        r#"{"scenarios": [], "extra": 1}"#,
    ];
    for body in bad {
        let s = write_suite(dir.path(), body);
        let code = bin().args(["run"]).arg(&s).arg("--out").arg(dir.path().join("o")).status().unwrap().code();
        assert_eq!(code, Some(2), "{body}");
    }
    assert_eq!(bin().arg("frobnicate").status().unwrap().code(), Some(2));
    assert_eq!(bin().args(["volume", "--body", "no_such_body"]).status().unwrap().code(), Some(2));
    assert_eq!(bin().args(["run", "/does/not/exist.json", "--out", "/tmp/x"]).status().unwrap().code(), Some(2));
}

#[test]
fn subcommands() {
    let v = json(&bin().args(["volume", "--body", "lshape"]).output().unwrap());
    assert_eq!(v["volume"], 3.0);
    assert!((v["ratio_poly"].as_f64().unwrap() - 3.5 / 3.0).abs() < 1e-12);

    let v = json(&bin().args(["gamma", "--cloud", "two_point_e1", "--method", "exact"]).output().unwrap());
    assert_eq!(v["value"], 1.0);

    let v = json(&bin().args(["profile", "--chi", "2", "--psi", "-3", "--delta", "1"]).output().unwrap());
    assert_eq!(v["l_exists"], false);

    let v = json(&bin().args(["hull", "--cloud", "square_corners"]).output().unwrap());
    assert_eq!(v["volume"], 1.0);

    let v = json(&bin().args(["cover", "--cloud", "grid5x5", "--eps", "0.4"]).output().unwrap());
    assert!(v["n_exact"].is_null() || v["n_exact"].as_u64().unwrap() <= v["n_greedy"].as_u64().unwrap());

    let v = json(&bin().args(["revbm", "--a", "unit_square", "--b", "unit_square"]).output().unwrap());
    assert!((v["empirical_c1"].as_f64().unwrap() - 4.0 / std::f64::consts::PI).abs() < 1e-9);

    let v = json(&bin().args(["minkavg", "--cloud", "two_point_e1", "--k", "2"]).output().unwrap());
    assert!((v["hausdorff_to_hull"].as_f64().unwrap() - 0.25).abs() <= 0.01);

    let a = json(&bin().args(["supgauss", "--cloud", "pm_e1", "--trials", "1000", "--seed", "3"]).output().unwrap());
    let b = json(&bin().args(["supgauss", "--cloud", "pm_e1", "--trials", "1000"]).env("HULLMETRY_SEED", "3").output().unwrap());
    assert_eq!(a, b);
}

#[test]
fn fixture_paths_resolve() {
    let path = suite("fixtures/bodies/unit_square.json");
    let v = json(&bin().args(["volume", "--body"]).arg(&path).output().unwrap());
    assert_eq!(v["volume"], 1.0);
}
