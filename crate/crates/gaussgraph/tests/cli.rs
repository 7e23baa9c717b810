use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaussgraph"))
        .args(args)
        .env_remove("GAUSSGRAPH_TOL")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn sigma(v: &Value) -> Vec<f64> {
    v["sigma"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

#[test]
fn build_squeezed_vacuum() {
    let out = run(&["build", path(&fixture("squeeze.json"))]);
    assert_eq!(code(&out), 0);
    let s = sigma(&json(&out));
    assert!((s[0] - 0.5 * 2f64.exp()).abs() < 1e-12);
    assert!((s[3] - 0.5 * (-2f64).exp()).abs() < 1e-12);
}

#[test]
fn db_flag_converts_quadrature_variance_decibels() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("c.json");
    fs::write(
        &circuit,
        r#"{"modes": 1, "ops": [{"kind": "squeeze", "mode": 1, "r": 10.0}]}"#,
    )
    .unwrap();
    let out = run(&["build", path(&circuit), "--db"]);
    assert_eq!(code(&out), 0);
    let s = sigma(&json(&out));
    assert!(
        (s[3] / 0.5 - 0.1).abs() < 1e-12,
        "10 dB divides Var P by 10"
    );
}

#[test]
fn six_mode_circuit_rebuilds_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let built = dir.path().join("six.json");
    let out = run(&[
        "build",
        path(&fixture("six_mode_circuit.json")),
        "--out",
        path(&built),
    ]);
    assert_eq!(code(&out), 0);
    let a = sigma(&serde_json::from_str(&fs::read_to_string(&built).unwrap()).unwrap());
    let b = sigma(
        &serde_json::from_str(&fs::read_to_string(fixture("six_mode.json")).unwrap()).unwrap(),
    );
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-9));
}

#[test]
fn graph_dot_shows_disconnected_real_part() {
    let out = run(&["graph", path(&fixture("six_mode.json")), "--format", "dot"]);
    assert_eq!(code(&out), 0);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("graph Z {"));
    for edge in ["1 -- 3", "2 -- 3", "5 -- 6"] {
        assert!(dot.contains(edge), "missing {edge}");
    }
    assert!(!dot
        .lines()
        .any(|l| l.contains("3 -- 4") && !l.contains("dashed")));
    assert!(dot
        .lines()
        .any(|l| l.contains("3 -- 4") && l.contains("dashed")));
}

#[test]
fn graph_json_of_cluster_state() {
    let out = run(&[
        "graph",
        path(&fixture("cz_cluster.json")),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["n"], 3);
    let vm: Vec<f64> = v["V"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!((vm[1] - 1.0).abs() < 1e-9 && (vm[5] - 1.0).abs() < 1e-9 && vm[2].abs() < 1e-9);
}

#[test]
fn diagnose_two_mode_and_flagged_states() {
    let out = run(&[
        "diagnose",
        path(&fixture("btheta0.json")),
        path(&fixture("flagged_4mode.json")),
    ]);
    assert_eq!(code(&out), 0, "diagnosis is not an error");
    let reports = json(&out);
    let two = &reports[0];
    assert_eq!(two["criterion"]["flagged"], false);
    let min = two["ppt"][0]["eigenvalues"][0].as_f64().unwrap();
    assert!((min - 0.5 * (-0.65f64).exp()).abs() < 1e-9);
    let four = &reports[1];
    assert_eq!(four["criterion"]["flagged"], true);
    assert!(!four["criterion"]["witnesses"]
        .as_array()
        .unwrap()
        .is_empty());
}

#[test]
fn reduce_six_mode_reveals_edges() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "reduce",
        path(&fixture("six_mode.json")),
        "--out",
        path(&out_dir),
    ]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["reduction"]["outcome"], "success");
    let reduced = out_dir.join("six_mode.reduced.json");
    let glus = out_dir.join("six_mode.glus.json");
    assert!(reduced.exists());
    let edges = run(&["graph", path(&reduced), "--format", "json"]);
    let v: Vec<f64> = json(&edges)["V"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    let present: Vec<(usize, usize)> = (0..6)
        .flat_map(|j| (j + 1..6).map(move |k| (j, k)))
        .filter(|&(j, k)| v[6 * j + k].abs() > 1e-6)
        .collect();
    assert_eq!(present, vec![(0, 2), (1, 2), (2, 3), (3, 4), (4, 5)]);
    assert_eq!(
        code(&run(&[
            "verify",
            path(&fixture("six_mode.json")),
            path(&glus)
        ])),
        0
    );
}

#[test]
fn reduce_btheta_matches_squeezing_glu_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "reduce",
        path(&fixture("btheta0.json")),
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 0);
    let u: Vec<f64> = json(&out)["reduction"]["graph"]["U"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!((u[0] + u[3] - 2.0 / 0.65f64.cosh()).abs() < 1e-9);
}

#[test]
fn reduce_flagged_is_irreducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "reduce",
        path(&fixture("flagged_4mode.json")),
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 10);
    assert_eq!(json(&out)["reduction"]["outcome"], "irreducible");
    assert!(!dir.path().join("flagged_4mode.reduced.json").exists());
}

#[test]
fn verify_reference_glus() {
    assert_eq!(
        code(&run(&[
            "verify",
            path(&fixture("six_mode.json")),
            path(&fixture("six_mode_glus.json"))
        ])),
        0
    );
    assert_eq!(
        code(&run(&[
            "verify",
            path(&fixture("btheta0.json")),
            path(&fixture("btheta0_glus.json"))
        ])),
        0
    );
}

#[test]
fn verify_identity_names_diagonal_u() {
    let out = run(&[
        "verify",
        path(&fixture("six_mode.json")),
        path(&fixture("identity6_glus.json")),
    ]);
    assert_eq!(code(&out), 12);
    assert_eq!(json(&out)["violation"], "diagonal-u");
    assert!(String::from_utf8_lossy(&out.stderr).contains("diagonal-u"));
}

#[test]
fn verify_rejects_non_symplectic_block() {
    let dir = tempfile::tempdir().unwrap();
    let glus = dir.path().join("g.json");
    fs::write(
        &glus,
        r#"{"n": 2, "blocks": [[[2.0, 0.0], [0.0, 2.0]], [[1.0, 0.0], [0.0, 1.0]]]}"#,
    )
    .unwrap();
    let out = run(&["verify", path(&fixture("epr.json")), path(&glus)]);
    assert_eq!(code(&out), 12);
    assert_eq!(json(&out)["violation"], "symplectic");
}

#[test]
fn malformed_json_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"n\": 1, \"sigma\": [0.5, 0").unwrap();
    assert_eq!(code(&run(&["graph", path(&bad)])), 2);
}

#[test]
fn missing_file_exits_1() {
    assert_eq!(code(&run(&["graph", "/nonexistent/state.json"])), 1);
}

#[test]
fn non_symplectic_gate_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("c.json");
    fs::write(&circuit, r#"{"modes": 1, "ops": [{"kind": "local", "mode": 1, "matrix": [[2.0, 0.0], [0.0, 2.0]]}]}"#)
        .unwrap();
    assert_eq!(code(&run(&["build", path(&circuit)])), 3);
}

#[test]
fn mixed_state_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let mixed = dir.path().join("m.json");
    fs::write(
        &mixed,
        r#"{"n": 1, "sigma": [1.0, 0.0, 0.0, 1.0], "ordering": "mode"}"#,
    )
    .unwrap();
    assert_eq!(
        code(&run(&["reduce", path(&mixed), "--out", path(dir.path())])),
        4
    );
}

#[test]
fn tolerance_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let near = dir.path().join("n.json");
    fs::write(
        &near,
        r#"{"n": 1, "sigma": [0.5000001, 0.0, 0.0, 0.5], "ordering": "mode"}"#,
    )
    .unwrap();
    assert_eq!(code(&run(&["graph", path(&near)])), 4);
    let out = Command::new(env!("CARGO_BIN_EXE_gaussgraph"))
        .args(["graph", path(&near)])
        .env("GAUSSGRAPH_TOL", "1e-5")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
}

#[test]
fn reports_are_deterministic() {
    let a = run(&["diagnose", path(&fixture("flagged_4mode.json"))]);
    let b = run(&["diagnose", path(&fixture("flagged_4mode.json"))]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn parallel_jobs_keep_input_order() {
    let files = [
        "epr.json",
        "btheta0.json",
        "cz_cluster.json",
        "six_mode.json",
    ]
    .map(fixture);
    let mut args = vec!["--jobs", "4", "diagnose"];
    args.extend(files.iter().map(|p| path(p)));
    let reports = json(&run(&args));
    let inputs: Vec<&str> = reports
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["input"].as_str().unwrap())
        .collect();
    assert_eq!(inputs, files.iter().map(|p| path(p)).collect::<Vec<_>>());
}
