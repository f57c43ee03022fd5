//! End-to-end tests of the `entwit` binary: exit codes, stdin handling,
//! document round-trips, and the JSON report contract.

use std::io::Write;
use std::process::{Command, Output, Stdio};

use entwit_core::document::MatrixDocument;
use entwit_core::maps::{delta_t_map, transpose_map};

fn entwit() -> Command {
    Command::new(env!("CARGO_BIN_EXE_entwit"))
}

fn run(args: &[&str]) -> Output {
    entwit().args(args).output().expect("binary runs")
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = entwit()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .expect("stdin piped")
        .write_all(input.as_bytes())
        .expect("stdin writes");
    child.wait_with_output().expect("binary exits")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn gen_rho1_roundtrips_through_the_document_layer() {
    let out = run(&["gen", "rho1"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout_str(&out);
    let doc = MatrixDocument::parse(&text).expect("gen emits valid documents");
    // parse -> serialize reproduces the generated bytes exactly.
    assert_eq!(doc.serialize(), text);
    let state = doc.into_state().expect("gen emits valid states");
    let expect = entwit_core::states::rho1_state();
    assert_eq!(state.matrix(), expect.matrix());
}

#[test]
fn analyze_rho1_detects_entanglement() {
    let rho1 = stdout_str(&run(&["gen", "rho1"]));
    let out = run_with_stdin(&["analyze", "-"], &rho1);
    assert_eq!(exit_code(&out), 1, "rho1 must be flagged entangled");
    let text = stdout_str(&out);
    assert!(text.contains("entangled-detected"), "{text}");
}

#[test]
fn analyze_separable_exits_zero() {
    let sep = stdout_str(&run(&["gen", "separable", "--dims", "2", "3", "--terms", "3", "--seed", "5"]));
    let out = run_with_stdin(&["analyze", "-"], &sep);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout_str(&out).contains("separable-consistent"));
}

#[test]
fn gen_separable_is_seed_deterministic() {
    let a = stdout_str(&run(&["gen", "separable", "--dims", "3", "3", "--terms", "4", "--seed", "7"]));
    let b = stdout_str(&run(&["gen", "separable", "--dims", "3", "3", "--terms", "4", "--seed", "7"]));
    assert_eq!(a, b);
    let c = stdout_str(&run(&["gen", "separable", "--dims", "3", "3", "--terms", "4", "--seed", "8"]));
    assert_ne!(a, c);
}

#[test]
fn analyze_rejects_bad_trace_naming_the_invariant() {
    // A diagonal matrix with trace 0.9.
    let bad = r#"{"kind":"state","dim_a":2,"dim_b":2,"matrix":[
        [[0.5,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0]],
        [[0.0,0.0],[0.4,0.0],[0.0,0.0],[0.0,0.0]],
        [[0.0,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0]],
        [[0.0,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0]]]}"#;
    let out = run_with_stdin(&["analyze", "-"], bad);
    assert_eq!(exit_code(&out), 2);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("trace"), "diagnostic must name the trace invariant: {stderr}");
}

#[test]
fn analyze_rejects_garbage_with_exit_2() {
    let out = run_with_stdin(&["analyze", "-"], "not json at all");
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn analyze_json_report_validates_against_the_shipped_schema() {
    let schema_text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../docs/report.schema.json"
    ))
    .expect("schema ships with the repo");
    let schema: serde_json::Value = serde_json::from_str(&schema_text).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");

    for (genargs, expect_code) in [
        (vec!["gen", "rho1"], 1),
        (vec!["gen", "separable", "--dims", "2", "2", "--terms", "2", "--seed", "3"], 0),
        (vec!["gen", "bell"], 1),
    ] {
        let doc = stdout_str(&run(&genargs));
        let out = run_with_stdin(&["analyze", "-", "--json"], &doc);
        assert_eq!(exit_code(&out), expect_code, "args {genargs:?}");
        let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
        let errors: Vec<String> = validator
            .iter_errors(&report)
            .map(|e| e.to_string())
            .collect();
        assert!(errors.is_empty(), "schema violations: {errors:?}");
    }
}

#[test]
fn choi_exit_codes_for_transpose_delta_and_channel() {
    let dir = tempfile::tempdir().unwrap();

    let transpose_path = dir.path().join("transpose.json");
    std::fs::write(
        &transpose_path,
        MatrixDocument::from_map(&transpose_map(3).unwrap()).serialize(),
    )
    .unwrap();
    let out = run(&["choi", transpose_path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1, "transpose is not CP");
    assert!(stdout_str(&out).contains("-1.0"), "min Choi eigenvalue -1: {}", stdout_str(&out));

    let delta_path = dir.path().join("delta.json");
    std::fs::write(
        &delta_path,
        MatrixDocument::from_map(&delta_t_map(3, 4.0).unwrap()).serialize(),
    )
    .unwrap();
    let out = run(&["choi", delta_path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "delta-t with t >= n is CP");

    let channel_path = dir.path().join("channel.json");
    let ch = entwit_core::channels::random_channel(2, 2, 11).unwrap();
    std::fs::write(&channel_path, MatrixDocument::from_channel(&ch).serialize()).unwrap();
    let out = run(&["choi", channel_path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "all-plus families are CP");

    let out = run(&["choi", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn witness_builtins_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let rho_path = dir.path().join("rho.json");
    let out = run(&["gen", "rho", "--a", "2", "--b", "0.5", "--out", rho_path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    let rho = rho_path.to_str().unwrap();

    // Gamma cannot detect a > 1; gamma-prime detects b < 1.
    assert_eq!(exit_code(&run(&["witness", rho, "gamma"])), 0);
    assert_eq!(exit_code(&run(&["witness", rho, "gamma-prime"])), 1);

    // Transpose witness agrees with PPT: rho is PPT, so it passes.
    assert_eq!(exit_code(&run(&["witness", rho, "transpose"])), 0);

    // delta-t requires --t.
    assert_eq!(exit_code(&run(&["witness", rho, "delta-t"])), 2);
    assert_eq!(exit_code(&run(&["witness", rho, "delta-t", "--t", "3.5"])), 0);

    // prop51 builtin from coefficient flags: a positive NCP witness.
    assert_eq!(
        exit_code(&run(&[
            "witness", rho, "prop51", "--arow", "1,1,1", "--brow", "1,0,0"
        ])),
        0
    );
    // Bad prop51 hypotheses are an input error.
    let out = run(&["witness", rho, "prop51", "--arow", "1,1,1", "--brow", "1,1,-1"]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8(out.stderr).unwrap().contains("f_13"));
}

#[test]
fn witness_spectrum_of_rho1_matches_the_reference_list() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho1.json");
    run(&["gen", "rho1", "--out", path.to_str().unwrap()]);
    let out = run(&[
        "witness",
        path.to_str().unwrap(),
        "gamma",
        "--side",
        "right",
        "--spectrum",
        "--json",
    ]);
    assert_eq!(exit_code(&out), 1);
    let body: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let spectrum: Vec<f64> = body["spectrum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let mut expect: Vec<f64> = [-2.0, 301.0, 301.0, 6201.0, 6401.0, 6401.0, 6401.0, 6498.0, 6498.0]
        .iter()
        .map(|v| v / 19500.0)
        .collect();
    expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(spectrum.len(), expect.len());
    for (got, want) in spectrum.iter().zip(expect.iter()) {
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
}

#[test]
fn gen_rho_requires_parameters_and_validates_them() {
    assert_eq!(exit_code(&run(&["gen", "rho"])), 2);
    assert_eq!(exit_code(&run(&["gen", "rho", "--a", "1", "--b", "2"])), 2);
    // ab < 1 is rejected as non-PSD.
    let out = run(&["gen", "rho", "--a", "0.5", "--b", "0.5"]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8(out.stderr).unwrap().contains("psd"));
}

#[test]
fn gen_rho_has_the_documented_diagonal_pattern() {
    let text = stdout_str(&run(&["gen", "rho", "--a", "0.5", "--b", "2"]));
    let state = MatrixDocument::parse(&text).unwrap().into_state().unwrap();
    let (a, b) = (0.5, 2.0);
    let norm = 3.0 * (1.0 + a + b);
    let expect = [1.0, a, b, b, 1.0, a, a, b, 1.0];
    for (i, want) in expect.iter().enumerate() {
        let got = state.matrix().get(i, i);
        assert!(
            (got - num_complex::Complex64::new(want / norm, 0.0)).norm() < 1e-15,
            "diagonal slot {i}"
        );
    }
}

#[test]
fn gen_bell_is_the_maximally_entangled_projector() {
    let text = stdout_str(&run(&["gen", "bell"]));
    let state = MatrixDocument::parse(&text).unwrap().into_state().unwrap();
    assert_eq!(state.dim_a(), 2);
    let m = state.matrix();
    for (i, j, want) in [(0usize, 0usize, 0.5), (0, 3, 0.5), (3, 0, 0.5), (3, 3, 0.5), (1, 1, 0.0)] {
        assert!((m.get(i, j) - num_complex::Complex64::new(want, 0.0)).norm() < 1e-15);
    }
}

#[test]
fn analyze_rejects_maps_matching_neither_factor() {
    let dir = tempfile::tempdir().unwrap();
    let map_path = dir.path().join("t4.json");
    std::fs::write(
        &map_path,
        MatrixDocument::from_map(&transpose_map(4).unwrap()).serialize(),
    )
    .unwrap();
    let bell = stdout_str(&run(&["gen", "bell"]));
    let out = run_with_stdin(&["analyze", "-", "--map", map_path.to_str().unwrap()], &bell);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8(out.stderr).unwrap().contains("neither factor"));
}

#[test]
fn analyze_honors_the_tolerance_flag() {
    // With an absurdly loose tolerance every verdict passes, so even rho1
    // comes back separable-consistent.
    let rho1 = stdout_str(&run(&["gen", "rho1"]));
    let out = run_with_stdin(&["analyze", "-", "--tol", "1"], &rho1);
    assert_eq!(exit_code(&out), 0);
}

#[test]
fn analyze_accepts_extra_map_files() {
    let dir = tempfile::tempdir().unwrap();
    let map_path = dir.path().join("t2.json");
    std::fs::write(
        &map_path,
        MatrixDocument::from_map(&transpose_map(2).unwrap()).serialize(),
    )
    .unwrap();
    let bell = stdout_str(&run(&["gen", "bell"]));
    let out = run_with_stdin(
        &["analyze", "-", "--map", map_path.to_str().unwrap(), "--json"],
        &bell,
    );
    assert_eq!(exit_code(&out), 1);
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let witnesses = report["witnesses"].as_array().unwrap();
    // Default 2x2 battery (transpose, reduction) plus the extra file.
    assert_eq!(witnesses.len(), 3);
}
