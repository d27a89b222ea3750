use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn spinsync(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinsync"))
        .args(args)
        .arg("--output-dir")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let headers = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|x| x.parse::<f64>().unwrap()).collect())
        .collect();
    (headers, rows)
}

fn assert_ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn steady_without_drive_is_the_dark_state() {
    let tmp = TempDir::new().unwrap();
    let out = spinsync(tmp.path(), &["steady", "--epsilon", "0"]);
    assert_ok(&out);
    let json: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("steady_state.json")).unwrap()).unwrap();
    let density = &json["density"];
    assert_eq!(density["dim"], 3);
    for i in 0..3 {
        for j in 0..3 {
            let expected = if i == 1 && j == 1 { 1.0 } else { 0.0 };
            assert!((density["re"][i][j].as_f64().unwrap() - expected).abs() < 1e-12);
            assert!(density["im"][i][j].as_f64().unwrap().abs() < 1e-12);
        }
    }
    let (headers, rows) = read_csv(&tmp.path().join("phase.csv"));
    assert_eq!(headers, ["phi", "s"]);
    assert_eq!(rows.len(), 360);
    assert!(rows.iter().all(|r| r[1].abs() < 1e-12));
}

#[test]
fn compare_spins_default_values() {
    let tmp = TempDir::new().unwrap();
    assert_ok(&spinsync(tmp.path(), &["compare-spins"]));
    let (headers, rows) = read_csv(&tmp.path().join("compare_spins.csv"));
    assert_eq!(headers, ["spin", "s_max"]);
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0][0], rows[1][0]), (1.0, 2.0));
    assert!((rows[0][1] - 0.032).abs() < 0.003, "{}", rows[0][1]);
    assert!((rows[1][1] - 0.001).abs() < 0.0005, "{}", rows[1][1]);
}

#[test]
fn qfunc_without_drive_matches_closed_form() {
    let tmp = TempDir::new().unwrap();
    assert_ok(&spinsync(tmp.path(), &["qfunc", "--epsilon", "0"]));
    let (headers, rows) = read_csv(&tmp.path().join("qfunc.csv"));
    assert_eq!(headers, ["theta", "phi", "q"]);
    assert_eq!(rows.len(), 64 * 360);
    for r in &rows {
        assert!((r[2] - 3.0 * r[0].sin().powi(2) / (8.0 * PI)).abs() < 1e-12);
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let body = r#"{
        "grid": {"n_theta": 16, "n_phi": 72},
        "arnold": {"deltas": [-1, 0, 1], "epsilons": [0.05, 0.1]},
        "breakdown": {"epsilons": [0.01, 1.0]},
        "evolve": {"t_final": 2.0, "samples": 3}
    }"#;
    for cmd in ["arnold", "breakdown", "evolve", "steady", "nogo"] {
        for dir in [&a, &b] {
            let cfg = write_config(dir.path(), body);
            assert_ok(&spinsync(dir.path(), &[cmd, "--config", &cfg]));
        }
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 10);
    for name in names {
        assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap(), "{name:?}");
    }
}

#[test]
fn sweep_outputs_follow_their_schemas() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"grid": {"n_theta": 16, "n_phi": 72},
            "arnold": {"deltas": [-1, 0, 1], "epsilons": [0.05, 0.1]},
            "breakdown": {"epsilons": [0.01, 1.0]}}"#,
    );
    assert_ok(&spinsync(tmp.path(), &["arnold", "--config", &cfg]));
    assert_ok(&spinsync(tmp.path(), &["breakdown", "--config", &cfg]));

    let (headers, rows) = read_csv(&tmp.path().join("arnold.csv"));
    assert_eq!(headers, ["delta", "epsilon", "s_max", "phi_star", "mean_sz"]);
    assert_eq!(rows.len(), 6);
    assert_eq!((rows[0][0], rows[0][1], rows[1][1]), (-1.0, 0.05, 0.1));
    assert!((rows[0][2] - rows[4][2]).abs() < 1e-12);

    let sidecar: Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("arnold.params.json")).unwrap()).unwrap();
    assert_eq!(sidecar["axis_unit"], "gamma_min");
    assert_eq!(sidecar["gamma_min"], 0.1);

    let (headers, rows) = read_csv(&tmp.path().join("breakdown.csv"));
    assert_eq!(headers[0], "delta");
    assert!(rows[1][4].abs() > 10.0 * rows[0][4].abs());
    let (headers, rows) = read_csv(&tmp.path().join("breakdown_band.csv"));
    assert_eq!(headers, ["epsilon", "equator_weight"]);
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r[1] > 0.0 && r[1] < 1.0));
}

#[test]
fn evolution_starts_phase_symmetric() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), r#"{"grid": {"n_theta": 16, "n_phi": 36}, "evolve": {"t_final": 5, "samples": 6}}"#);
    assert_ok(&spinsync(tmp.path(), &["evolve", "--config", &cfg]));
    let (headers, rows) = read_csv(&tmp.path().join("evolution.csv"));
    assert_eq!(headers, ["t", "phi", "s"]);
    assert_eq!(rows.len(), 6 * 36);
    assert!(rows[..36].iter().all(|r| r[0] == 0.0 && r[2].abs() < 1e-12));
    assert!((rows[rows.len() - 1][0] - 5.0).abs() < 1e-12);
    // the signal has started to pull the distribution towards phi = 0
    assert!(rows[5 * 36][2] > 0.0);
}

#[test]
fn nogo_report_for_the_qubit() {
    let tmp = TempDir::new().unwrap();
    assert_ok(&spinsync(tmp.path(), &["nogo"]));
    let json: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("nogo.json")).unwrap()).unwrap();
    assert_eq!(json["verdict"], "extremal_only");
    assert_eq!(json["samples"].as_array().unwrap().len(), 21);
}

#[test]
fn config_errors_exit_with_one() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), r#"{"spin": 1, "detuning": 0.5}"#);
    let cases: Vec<Vec<&str>> = vec![
        vec!["steady", "--config", &cfg],
        vec!["steady", "--spin", "0.3"],
        vec!["steady", "--gamma-g", "-1"],
        vec!["breakdown", "--delta", "0.5"],
        vec!["compare-spins", "--config", "/nonexistent/config.json"],
        vec!["no-such-command"],
    ];
    for args in cases {
        let out = spinsync(tmp.path(), &args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn degenerate_steady_state_exits_with_two_and_names_the_point() {
    let tmp = TempDir::new().unwrap();
    let out = spinsync(tmp.path(), &["steady", "--gamma-g", "0", "--epsilon", "0", "--delta", "0.25"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("delta=0.25") && stderr.contains("epsilon=0"), "{stderr}");
}
