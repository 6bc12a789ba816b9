use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn wcec_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wcec-lab")).args(args).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("exp.json");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL: &str = r#"{
    "benchmark": "matmult-int:8",
    "runs": 2000,
    "ga": {"population": 8, "generations": 3},
    "sequence": ["mov", "add", "mul", "add"],
    "out_dir": "out"
}"#;

#[test]
fn profile_then_wcec_reuses_fit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = wcec_lab(&["profile", "--config", &cfg, "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let listed = String::from_utf8(out.stdout).unwrap();
    assert_eq!(listed.lines().count(), 3);
    for f in ["sample.csv", "fit.json", "histogram.csv"] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }
    let sample = fs::read_to_string(dir.path().join("out/sample.csv")).unwrap();
    assert!(sample.starts_with("# {"));
    assert!(sample.contains("\"seed\":3"));

    let out = wcec_lab(&["wcec", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/wcec.json")).unwrap()).unwrap();
    assert_eq!(report["nbits"], 1024);
    assert!(report["x_star"].as_f64().unwrap() > report["fit"]["mu"].as_f64().unwrap());
}

#[test]
fn characterize_then_predict() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("elsewhere");
    let out_arg = out_dir.to_string_lossy().into_owned();
    for cmd in ["characterize", "predict"] {
        let out = wcec_lab(&[cmd, "--config", &cfg, "--out", &out_arg]);
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let pct: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("percentiles.json")).unwrap()).unwrap();
    let p = &pct["percentiles_pJ"];
    assert!(p["p50"].as_f64() < p["p99"].as_f64());
    assert!(p["p99"].as_f64() < p["p999"].as_f64());
}

#[test]
fn predict_without_transition_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("t.json"),
        r#"[{"op_a": "mov", "op_b": "mov", "k": 2.0, "mu": 100.0, "sigma": 10.0, "n_samples": 1000}]"#,
    )
    .unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"sequence": ["mov", "eor"], "transitions_file": "t.json", "out_dir": "out"}"#,
    );
    let out = wcec_lab(&["predict", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("(mov, eor)"));
}

#[test]
fn bad_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"runs": 0}"#);
    assert_eq!(wcec_lab(&["profile", "--config", &cfg]).status.code(), Some(2));
    let cfg = write_config(dir.path(), r#"{"no_such_field": 1}"#);
    assert_eq!(wcec_lab(&["profile", "--config", &cfg]).status.code(), Some(2));
    let missing = dir.path().join("absent.json");
    assert_eq!(
        wcec_lab(&["mulmap", "--config", &missing.to_string_lossy()]).status.code(),
        Some(2)
    );
}

#[test]
fn too_few_runs_to_fit_is_numeric() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"benchmark": "fdct", "runs": 5, "out_dir": "out"}"#);
    assert_eq!(wcec_lab(&["profile", "--config", &cfg]).status.code(), Some(3));
}

#[test]
fn characterize_needs_enough_mov_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"runs": 999, "out_dir": "out"}"#);
    let out = wcec_lab(&["characterize", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("(mov, mov)"));
}

#[test]
fn mulmap_covers_every_operand_pair() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"out_dir": "out"}"#);
    assert!(wcec_lab(&["mulmap", "--config", &cfg]).status.success());
    let map = fs::read_to_string(dir.path().join("out/map.csv")).unwrap();
    // meta line, column header, 65536 cells
    assert_eq!(map.lines().count(), 2 + 65_536);
}
