use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn luders(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_luders"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("luders-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

const BELL: &str = r#"{
  "dimension": 4,
  "observables": [
    { "name": "ZI", "matrix": { "re": [[1,0,0,0],[0,1,0,0],[0,0,-1,0],[0,0,0,-1]] } },
    { "name": "IZ", "matrix": { "re": [[1,0,0,0],[0,-1,0,0],[0,0,1,0],[0,0,0,-1]] } }
  ],
  "states": [ { "name": "bell", "vector": { "re": [0.7071067811865476, 0, 0, 0.7071067811865476] } } ],
  "seed": 9
}"#;

const ZX: &str = r#"{ "dimension": 2, "observables": [
  { "name": "Z", "matrix": { "re": [[1, 0], [0, -1]] } },
  { "name": "X", "matrix": { "re": [[0, 1], [1, 0]] } } ] }"#;

#[test]
fn check_exit_statuses() {
    let dir = scratch("check");
    let bell = write(&dir, "bell.json", BELL);
    let zx = write(&dir, "zx.json", ZX);
    let bad = write(
        &dir,
        "bad.json",
        r#"{ "dimension": 2, "observables": [ { "name": "N", "matrix": { "re": [[0, 1], [0, 0]] } } ] }"#,
    );
    let broken = write(&dir, "broken.json", "{ \"dimension\": ");

    let out = luders(&["check", &bell, "--states", "4"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("all pairwise compatible"));

    assert_eq!(luders(&["check", &zx]).status.code(), Some(1));

    let out = luders(&["check", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("observables[0]"));
    assert_eq!(luders(&["check", &broken]).status.code(), Some(2));
    assert_eq!(
        luders(&["check", &dir.join("missing.json").to_string_lossy()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(luders(&["frobnicate"]).status.code(), Some(2));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn structured_report_fields() {
    let dir = scratch("structured");
    let bell = write(&dir, "bell.json", BELL);
    let out = luders(&["check", &bell, "--format", "structured", "--states", "2"]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["verdict"], "all-pairwise-compatible");
    assert_eq!(report["seed"], 9);
    assert!(report["version"].is_string());
    assert!(report["witness"].is_null() && report["obstruction"].is_null());
    assert_eq!(report["model"]["points"].as_array().unwrap().len(), 4);
    assert_eq!(
        report["model"]["pmf_per_state"].as_array().unwrap().len(),
        3
    );
    for key in ["born", "diagram", "laws"] {
        assert!(report["verifications"][key].is_object(), "{key}");
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn model_writes_tables() {
    let dir = scratch("model");
    let bell = write(&dir, "bell.json", BELL);
    let out_path = dir.join("model.json");
    let out = luders(&[
        "model",
        &bell,
        "--out",
        &out_path.to_string_lossy(),
        "--states",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(doc["observables"], serde_json::json!(["ZI", "IZ"]));
    let pmf: Vec<f64> = doc["pmf_per_state"][0]["pmf"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let expected = [0.5, 0.0, 0.0, 0.5];
    for (p, e) in pmf.iter().zip(expected) {
        assert!((p - e).abs() < 1e-12);
    }

    let zx = write(&dir, "zx.json", ZX);
    let refused = dir.join("refused.json");
    assert_eq!(
        luders(&["model", &zx, "--out", &refused.to_string_lossy()])
            .status
            .code(),
        Some(1)
    );
    assert!(!refused.exists());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn witness_command() {
    let dir = scratch("witness");
    let zx = write(&dir, "zx.json", ZX);
    let bell = write(&dir, "bell.json", BELL);
    let out = luders(&["witness", &zx, "--format", "structured"]);
    assert_eq!(out.status.code(), Some(1));
    let w: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let violation = w["violation"].as_f64().unwrap();
    assert!((violation - 2f64.sqrt() / 4.0).abs() < 1e-12);
    assert_eq!(w["state"]["re"].as_array().unwrap().len(), 2);

    let out = luders(&["witness", &bell]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("no witness"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn generated_scenarios_round_trip_through_check() {
    let dir = scratch("gen");
    for (compatible, status) in [("true", 0), ("false", 1)] {
        let out = luders(&[
            "gen",
            "random",
            "--dim",
            "3",
            "--count",
            "2",
            "--compatible",
            compatible,
            "--seed",
            "4",
        ]);
        assert_eq!(out.status.code(), Some(0));
        let again = luders(&[
            "gen",
            "random",
            "--dim",
            "3",
            "--count",
            "2",
            "--compatible",
            compatible,
            "--seed",
            "4",
        ]);
        assert_eq!(out.stdout, again.stdout);
        let path = write(
            &dir,
            &format!("gen-{compatible}.json"),
            &String::from_utf8(out.stdout).unwrap(),
        );
        assert_eq!(
            luders(&["check", &path, "--states", "3"]).status.code(),
            Some(status)
        );
    }
    assert_eq!(
        luders(&[
            "gen",
            "random",
            "--dim",
            "1",
            "--count",
            "2",
            "--compatible",
            "true"
        ])
        .status
        .code(),
        Some(2)
    );
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn wave_demo_command() {
    let out = luders(&["demo", "wave", "--modes", "3", "--states", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("wave demo, 3 modes"));
    assert!(text.contains("finite-mode surrogate"));
    assert_eq!(
        luders(&["demo", "wave", "--modes", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn tolerance_override_changes_verdict() {
    let dir = scratch("tol");
    // Z and a slightly tilted Z: order gap of order 1e-6
    let tilted = r#"{ "dimension": 2, "observables": [
      { "name": "Z", "matrix": { "re": [[1, 0], [0, -1]] } },
      { "name": "T", "matrix": { "re": [[0.999999999999, 0.000001414213562], [0.000001414213562, -0.999999999999]] } } ] }"#;
    let path = write(&dir, "tilted.json", tilted);
    assert_eq!(
        luders(&["check", &path, "--states", "2"]).status.code(),
        Some(1)
    );
    // accepted as compatible, but the model is only exact to the looser tolerance
    assert_eq!(
        luders(&["check", &path, "--states", "2", "--tol-compat", "1e-3"])
            .status
            .code(),
        Some(3)
    );
    let loose = [
        "check",
        &path,
        "--states",
        "2",
        "--tol-compat",
        "1e-3",
        "--tol-model",
        "1e-3",
    ];
    assert_eq!(luders(&loose).status.code(), Some(0));
    std::fs::remove_dir_all(dir).unwrap();
}
