//! End-to-end checks of the compiled binary: exit codes, output files,
//! determinism, and provenance headers.

use std::path::Path;
use std::process::{Command, Output};

fn qcounter(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcounter"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_scenario(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

const GAMMA_SCENARIO: &str =
    r#"{"kind":"gamma","filter_fwhm_nm":5,"pump_fwhm_nm":10,"center_nm":790}"#;

#[test]
fn gamma_scenario_emits_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "gamma.json", GAMMA_SCENARIO);
    let out = qcounter(&["gamma", "--scenario", &scenario, "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let payload: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("gamma.json"))).unwrap();
    let closed = payload["gamma_closed"].as_f64().unwrap();
    assert!((closed - 0.8944272).abs() < 1e-6, "gamma_closed = {closed}");
    let numeric = payload["gamma_numeric"].as_f64().unwrap();
    assert!((numeric - closed).abs() < 1e-5);
    assert!(payload["manifest_hash"].is_string());
    // manifest written with the conversions block
    let manifest: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("manifest.json"))).unwrap();
    assert!(manifest["conversions"]["filter_variance_rad2_s2"].as_f64().unwrap() > 0.0);
}

#[test]
fn unknown_scenario_key_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "bad.json",
        r#"{"kind":"gamma","filter_fwhm_nm":5,"pump_fwhm_nm":10,"center_nm":790,"chirp":1}"#,
    );
    let out = qcounter(&["gamma", "--scenario", &scenario]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("chirp"), "{stderr}");
}

#[test]
fn invalid_n_bar_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "g2.json",
        r#"{"kind":"g2","gamma":0.45,"n_bar_grid":[-1.0,0.5]}"#,
    );
    let out = qcounter(&["g2", "--scenario", &scenario]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kind_mismatch_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "gamma.json", GAMMA_SCENARIO);
    let out = qcounter(&["network", "--scenario", &scenario]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn quadrature_non_convergence_exits_numerical() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "tight.json",
        r#"{"kind":"gamma","filter_fwhm_nm":5,"pump_fwhm_nm":10,"center_nm":790,
            "quadrature":{"points_per_axis":8,"target_abs_tol":1e-13}}"#,
    );
    let out = qcounter(&["gamma", "--scenario", &scenario]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn g2_curve_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "g2.json",
        r#"{"kind":"g2","gamma":1.0,"n_bar_grid":[0.0,1.0,4.0]}"#,
    );
    let out = qcounter(&["g2", "--scenario", &scenario, "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let csv = read(&dir.path().join("g2.csv"));
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# qcounter manifest "));
    assert_eq!(lines.next().unwrap(), "n_bar,gamma,g2");
    assert_eq!(lines.next().unwrap(), "0,1,2");
    assert_eq!(lines.next().unwrap(), "1,1,1.75");
    let last: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(last[0], "4");
    assert!((last[2].parse::<f64>().unwrap() - 1.36).abs() < 1e-12);
}

#[test]
fn g2_spectral_route_embeds_integrals() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "g2.json",
        r#"{"kind":"g2","filter_fwhm_nm":5,"pump_fwhm_nm":10,"center_nm":790,
            "n_bar_grid":[0.0,1.0]}"#,
    );
    let out = qcounter(&["g2", "--scenario", &scenario, "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let payload: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("g2.json"))).unwrap();
    let gamma = payload["gamma_used"].as_f64().unwrap();
    assert!((gamma - 0.8944272).abs() < 1e-5, "gamma_used = {gamma}");
    assert!(payload["spectral_integrals"]["i_diag"].as_f64().unwrap() > 0.0);
    assert!(payload["spectral_integrals"]["i_cross"].as_f64().unwrap() > 0.0);
    let g2_at_zero = payload["rows"][0]["g2"].as_f64().unwrap();
    assert!((g2_at_zero - (1.0 + gamma)).abs() < 1e-12);
}

#[test]
fn network_scenario_reports_g2() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "network.json",
        r#"{"kind":"network",
            "input":{"type":"vacuum"},
            "zeta_mag":0.15,
            "splitter_t_mag":0.7071067811865476,
            "eta_1":0.3,"eta_2":0.3,
            "cutoff":10}"#,
    );
    let out =
        qcounter(&["network", "--scenario", &scenario, "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let payload: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("network.json"))).unwrap();
    let g2 = payload["report"]["g2"].as_f64().unwrap();
    assert!((g2 - 2.0).abs() < 5e-3, "g2 = {g2}");
}

#[test]
fn mc_outputs_are_byte_identical_for_fixed_seed() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let body = r#"{"kind":"mc",
        "network":{"input":{"type":"vacuum"},"zeta_mag":0.2,
                   "splitter_t_mag":0.7071067811865476,
                   "eta_1":0.8,"eta_2":0.8,"cutoff":12},
        "pulses":20000,
        "seed":11,
        "sweep_n_bar":[0.0,1.0]}"#;
    let scenario_a = write_scenario(dir_a.path(), "mc.json", body);
    let scenario_b = write_scenario(dir_b.path(), "mc.json", body);
    let out_a =
        qcounter(&["mc", "--scenario", &scenario_a, "--out", dir_a.path().to_str().unwrap()]);
    let out_b =
        qcounter(&["mc", "--scenario", &scenario_b, "--out", dir_b.path().to_str().unwrap()]);
    assert!(out_a.status.success(), "{}", String::from_utf8_lossy(&out_a.stderr));
    assert!(out_b.status.success());
    for name in ["mc.json", "mc_sweep.csv"] {
        let a = read(&dir_a.path().join(name));
        let b = read(&dir_b.path().join(name));
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    // the seed flag overrides and changes the data
    let dir_c = tempfile::tempdir().unwrap();
    let scenario_c = write_scenario(dir_c.path(), "mc.json", body);
    let out_c = qcounter(&[
        "mc",
        "--scenario",
        &scenario_c,
        "--out",
        dir_c.path().to_str().unwrap(),
        "--seed",
        "99",
    ]);
    assert!(out_c.status.success());
    assert_ne!(read(&dir_a.path().join("mc.json")), read(&dir_c.path().join("mc.json")));
}

#[test]
fn manifest_hash_stable_under_key_reordering() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let scenario_a = write_scenario(dir_a.path(), "a.json", GAMMA_SCENARIO);
    let scenario_b = write_scenario(
        dir_b.path(),
        "b.json",
        r#"{"pump_fwhm_nm":10,"center_nm":790,"kind":"gamma","filter_fwhm_nm":5}"#,
    );
    assert!(qcounter(&["gamma", "--scenario", &scenario_a, "--out", dir_a.path().to_str().unwrap()])
        .status
        .success());
    assert!(qcounter(&["gamma", "--scenario", &scenario_b, "--out", dir_b.path().to_str().unwrap()])
        .status
        .success());
    let hash = |dir: &Path| {
        serde_json::from_str::<serde_json::Value>(&read(&dir.join("manifest.json"))).unwrap()
            ["scenario_hash"]
            .as_str()
            .unwrap()
            .to_string()
    };
    assert_eq!(hash(dir_a.path()), hash(dir_b.path()));
}

#[test]
fn order_scenario_prints_normal_form() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "order.json",
        r#"{"kind":"order",
            "expression":"a*a*adag*adag",
            "expectations":[
                {"modes":{"a":{"state":"vacuum"}}},
                {"modes":{"a":{"state":"coherent-symbolic","symbol":"nbar"}}},
                {"modes":{"a":{"state":"coherent","n_bar":1.0}}}
            ]}"#,
    );
    let out =
        qcounter(&["order", "--scenario", &scenario, "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("adag^2 a^2 + 4 adag a + 2"), "{stdout}");
    let payload: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("order.json"))).unwrap();
    assert_eq!(payload["normal"].as_str().unwrap(), "adag^2 a^2 + 4 adag a + 2");
    assert_eq!(payload["expectations"][0]["result"].as_str().unwrap(), "2");
    assert_eq!(
        payload["expectations"][1]["result"].as_str().unwrap(),
        "nbar^2 + 4 nbar + 2"
    );
    // numeric coherent n_bar = 1: 1 + 4 + 2
    let (re, im) = (
        payload["expectations"][2]["constant"][0].as_f64().unwrap(),
        payload["expectations"][2]["constant"][1].as_f64().unwrap(),
    );
    assert!((re - 7.0).abs() < 1e-9 && im.abs() < 1e-12, "({re}, {im})");
}

#[test]
fn order_inline_expression_and_syntax_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = qcounter(&["order", "--expr", "a*adag", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("adag a + 1"), "{stdout}");

    let bad = qcounter(&["order", "--expr", "a(w1)*", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&bad.stderr);
    assert!(stderr.contains("position 6"), "{stderr}");
}
