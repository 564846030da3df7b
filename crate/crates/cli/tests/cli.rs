//! End-to-end tests of the flowlab binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn flowlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flowlab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn json_of(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn write_vortex_spec(dir: &Path) -> std::path::PathBuf {
    let spec = serde_json::json!({
        "kind": {
            "type": "VortexProduct",
            "zeros": [{"position": [0.0, 0.0], "multiplicity": 1}]
        },
        "grid": {"nx": 257, "ny": 257, "x0": -1.0, "y0": -1.0,
                 "dx": 1.0 / 128.0, "dy": 1.0 / 128.0}
    });
    let path = dir.join("spec.json");
    fs::write(&path, spec.to_string()).unwrap();
    path
}

fn circle_loop_json(radius: f64, n: usize) -> serde_json::Value {
    let vertices: Vec<[f64; 2]> = (0..n)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / n as f64;
            [radius * a.cos(), radius * a.sin()]
        })
        .collect();
    serde_json::json!([{ "vertices": vertices, "sampling_density": 8.0 }])
}

#[test]
fn synth_analyze_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_vortex_spec(dir.path());
    let field = dir.path().join("psi.json");
    let out = flowlab(
        &["synth", "--spec", spec.to_str().unwrap(), "--out", field.to_str().unwrap()],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let loops = dir.path().join("loops.json");
    fs::write(&loops, circle_loop_json(0.5, 128).to_string()).unwrap();
    let report_path = dir.path().join("report.json");
    let out = flowlab(
        &[
            "analyze",
            "--field",
            field.to_str().unwrap(),
            "--loops",
            loops.to_str().unwrap(),
            "--out",
            report_path.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let report = json_of(&report_path);
    assert_eq!(report["nodes"].as_array().unwrap().len(), 1);
    assert_eq!(report["nodes"][0]["winding"], 1);
    assert_eq!(report["nodes"][0]["regularity"], "FinitePositive");
    assert_eq!(report["regularity_summary"]["finite_positive"], 1);
    assert_eq!(report["loops"][0]["winding"], 1);
    let circ = report["loops"][0]["circulation"].as_f64().unwrap();
    assert!((circ - 1.0).abs() < 1e-3, "circulation {circ}");
}

#[test]
fn alpha_scan_reproduces_the_selector_table() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("scan.json");
    let out = flowlab(
        &["alpha-scan", "--alphas", "0.5,1,1.5,2", "--out", out_path.to_str().unwrap()],
        dir.path(),
    );
    assert!(out.status.success());
    let report = json_of(&out_path);
    let classes: Vec<&str> = report["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["class"].as_str().unwrap())
        .collect();
    assert_eq!(
        classes,
        ["Divergent", "FinitePositive", "Vanishing", "Vanishing"]
    );
}

#[test]
fn regularize_reports_core_values() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    fs::write(&model, r#"{"alpha":1.0,"r0":1.0,"rho0":0.1,"lambda":1.0}"#).unwrap();
    let out_path = dir.path().join("reg.json");
    let csv_path = dir.path().join("omega.csv");
    let out = flowlab(
        &[
            "regularize",
            "--model",
            model.to_str().unwrap(),
            "--grid-n",
            "257",
            "--omega-profile",
            csv_path.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json_of(&out_path);
    assert_eq!(report["omega_at_zero"], 2.0);
    assert!((report["penalty_core"].as_f64().unwrap() - 1.6).abs() < 1e-12);
    assert!(report["curl_comparison"]["max_rel_err"].as_f64().unwrap() < 0.01);
    for row in report["circulations"].as_array().unwrap() {
        assert!(row["rel_err"].as_f64().unwrap() < 5e-3);
    }

    // the discrete-curl profile tracks 2 r0^2 / (r^2 + r0^2)^2 within 1%
    let csv = fs::read_to_string(&csv_path).unwrap();
    let mut checked = 0;
    for line in csv.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let (r, mean) = (cols[0], cols[1]);
        if r < 0.2 {
            continue;
        }
        let expect = 2.0 / (1.0 + r * r).powi(2);
        // the bin mean differs from the centre value by the in-bin spread
        assert!(
            (mean - expect).abs() / expect < 0.01,
            "r={r}: {mean} vs {expect}"
        );
        checked += 1;
    }
    assert!(checked > 10);
}

#[test]
fn smolin_dichotomy_over_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("smolin.json");
    let out = flowlab(
        &[
            "smolin",
            "--alpha",
            "0.5,3",
            "--times",
            "0,0.25,0.5,1",
            "--modes",
            "256",
            "--out",
            out_path.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json_of(&out_path);
    let runs = report["runs"].as_array().unwrap();
    assert_eq!(runs[0]["drift"][0], 0.0);
    assert!(runs[0]["max_drift"].as_f64().unwrap() > 0.01);
    assert!(runs[1]["max_drift"].as_f64().unwrap() <= 1e-12);
    for run in runs {
        assert_eq!(run["stationary_check"]["continuity_residual"], 0.0);
        assert_eq!(run["stationary_check"]["bohm_residual"], 0.0);
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_vortex_spec(dir.path());
    let field = dir.path().join("psi.json");
    flowlab(
        &["synth", "--spec", spec.to_str().unwrap(), "--out", field.to_str().unwrap()],
        dir.path(),
    );
    let (r1, r2) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for path in [&r1, &r2] {
        let out = flowlab(
            &["analyze", "--field", field.to_str().unwrap(), "--out", path.to_str().unwrap()],
            dir.path(),
        );
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&r1).unwrap(), fs::read(&r2).unwrap());
}

#[test]
fn stdin_dash_is_accepted() {
    use std::io::Write;
    let dir = tempfile::tempdir().unwrap();
    let spec = write_vortex_spec(dir.path());
    let mut child = Command::new(env!("CARGO_BIN_EXE_flowlab"))
        .args(["synth", "--spec", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(&fs::read(&spec).unwrap())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let field: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(field["grid"]["nx"], 257);
}

#[test]
fn malformed_input_exits_2_with_error_json() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{this is not json").unwrap();
    let out = flowlab(&["analyze", "--field", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "input-format");
    assert!(!err["error"]["message"].as_str().unwrap().is_empty());
}

#[test]
fn field_without_flow_region_exits_3() {
    // an all-zero field is well-formed input but has no unmasked flow points
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("zero.json");
    let n = 9usize;
    let payload = serde_json::json!({
        "grid": {"nx": n, "ny": n, "x0": -1.0, "y0": -1.0, "dx": 0.25, "dy": 0.25},
        "re": vec![0.0; n * n],
        "im": vec![0.0; n * n],
    });
    fs::write(&field, payload.to_string()).unwrap();
    let out = flowlab(&["analyze", "--field", field.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "numerical");
}

#[test]
fn usage_error_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = flowlab(&["analyze", "--no-such-flag"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let out = flowlab(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn loop_through_a_node_is_a_warning_not_a_failure() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_vortex_spec(dir.path());
    let field = dir.path().join("psi.json");
    flowlab(
        &["synth", "--spec", spec.to_str().unwrap(), "--out", field.to_str().unwrap()],
        dir.path(),
    );
    // a loop passing exactly through the node at the origin
    let loops = dir.path().join("loops.json");
    fs::write(
        &loops,
        serde_json::json!([{"vertices": [[-0.5, -0.5], [0.0, 0.0], [0.5, -0.5]]}]).to_string(),
    )
    .unwrap();
    let report_path = dir.path().join("report.json");
    let out = flowlab(
        &[
            "analyze",
            "--field",
            field.to_str().unwrap(),
            "--loops",
            loops.to_str().unwrap(),
            "--out",
            report_path.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json_of(&report_path);
    assert!(report["loops"][0]["error"].is_string());
    assert!(!report["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn help_and_version_exit_0() {
    let dir = tempfile::tempdir().unwrap();
    assert!(flowlab(&["--help"], dir.path()).status.success());
    assert!(flowlab(&["--version"], dir.path()).status.success());
}
