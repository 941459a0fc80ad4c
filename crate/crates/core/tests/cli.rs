use std::process::Command;

fn pplab(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pplab")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write_config(name: &str, body: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("pplab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn constants_table() {
    let (code, out, _) = pplab(&["constants", "--n", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("1,4*pi,"));
    assert!(out.contains("3,19456*pi^3,"));
}

#[test]
fn passing_suite_exits_zero() {
    let (code, out, _) = pplab(&["verify", "--suite", "constants", "--format", "json"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"schema_version\": 1") || out.contains("\"schema_version\":1"));
}

#[test]
fn failing_rows_exit_one_and_are_reported() {
    // the I_n cases for n >= 2 exceed their bound
    let (code, out, _) = pplab(&["verify", "--suite", "thm-5.1", "--format", "csv"]);
    assert_eq!(code, 1);
    assert!(out.contains(",pass,") && out.contains(",fail,"));
}

#[test]
fn configuration_errors_exit_two() {
    assert_eq!(pplab(&["verify", "--suite", "thm-9.9"]).0, 2);
    assert_eq!(pplab(&["bound", "nope"]).0, 2);
    let bad = write_config("bad.json", r#"{"schema_version": 1, "suite": "constants", "rel_tol": -1}"#);
    assert_eq!(pplab(&["verify", "--config", bad.to_str().unwrap()]).0, 2);
    let schema = write_config("schema.json", r#"{"schema_version": 99, "suite": "constants"}"#);
    assert_eq!(pplab(&["verify", "--config", schema.to_str().unwrap()]).0, 2);
}

#[test]
fn bound_and_capacity_subcommands() {
    let (code, out, _) = pplab(&["bound", "vol-cap", "--params", "n=2", "cap=1"]);
    assert_eq!(code, 0, "{out}");
    let cfg = write_config(
        "cap.json",
        r#"{"schema_version": 1, "condenser": {"domain": {"kind": "polydisc", "center": [[0,0],[0,0]], "radii": [1,1]},
            "set": {"kind": "subpolydisc", "radii": [0.5, 0.5]}}}"#,
    );
    let (code, out, err) = pplab(&["capacity", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let cap = v["capacity"].as_f64().unwrap();
    assert!((cap - 2f64.ln().powi(-2)).abs() < 1e-12);
}

#[test]
fn volume_and_slice_energy_subcommands() {
    let vol = write_config(
        "vol.json",
        r#"{"schema_version": 1, "model": {"family": "ToricMaxLog", "dimension": 2, "params": {"weights": [1, 1]}},
            "levels": [1.0]}"#,
    );
    let (code, out, err) = pplab(&["volume", "--config", vol.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("closed_form"));
    let slice = write_config(
        "slice.json",
        r#"{"schema_version": 1, "model": {"family": "ProductMaxLog", "dimension": 2, "params": {"z_weight": 1, "zeta_weight": 2}},
            "zetas": [[0.3, 0.1], [0.0, 0.0]]}"#,
    );
    let (code, out, err) = pplab(&["slice-energy", "--config", slice.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("singular"));
}
