use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn ncg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

/// A fresh scratch directory per test.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ncg-test-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const BUTTERFLY: &str =
    r#"{"n":5,"m":2,"beta":"1/2","eta":"uniform","actions":[[2,3],[1,3],[2,4],[3,5],[3,4]]}"#;
const THREE_CYCLE: &str = r#"{"n":3,"m":1,"beta":0.5,"actions":[[2],[3],[1]]}"#;

#[test]
fn butterfly_is_nonstrict_nash() {
    let dir = scratch("butterfly");
    let input = write(&dir, "butterfly.json", BUTTERFLY);
    let out = ncg(&["classify", "--input", &input]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = json(&out);
    assert_eq!(report["is_nash"], true);
    assert_eq!(report["is_strict"], false);
    assert_eq!(report["class"], "GB3Member");
    assert_eq!(report["non_unique_players"], serde_json::json!([3]));
}

#[test]
fn non_nash_exits_three_with_witness() {
    let dir = scratch("cycle");
    let input = write(&dir, "cycle.json", THREE_CYCLE);
    for backend in ["rational", "float"] {
        let out = ncg(&["classify", "-i", &input, "--backend", backend]);
        assert_eq!(out.status.code(), Some(3));
        let report = json(&out);
        assert_eq!(report["witness"]["player"], 1);
        assert_eq!(report["witness"]["improvement"], serde_json::json!([3]));
    }
}

#[test]
fn malformed_json_is_a_usage_error_with_position() {
    let dir = scratch("malformed");
    let input = write(&dir, "bad.json", "{\"n\": 3,\n  \"m\": ]");
    let out = ncg(&["centrality", "-i", &input]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("line 2") && err.contains("column"), "{err}");
}

#[test]
fn bad_arguments_exit_one() {
    assert_eq!(ncg(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(ncg(&["classify"]).status.code(), Some(1));
    assert_eq!(
        ncg(&["verify-theorems", "--n", "4", "--m", "1", "--beta", "3/2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(ncg(&["--help"]).status.code(), Some(0));
    let dir = scratch("args");
    let input = write(&dir, "cycle.json", THREE_CYCLE);
    let out = ncg(&["best-response", "-i", &input, "--player", "4"]);
    assert_eq!(out.status.code(), Some(1));
    let out = ncg(&["classify", "-i", &input, "--backend", "quad"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn beta_as_fraction_or_decimal() {
    let dir = scratch("beta");
    let input = write(&dir, "cycle.json", THREE_CYCLE);
    let a = ncg(&[
        "centrality",
        "-i",
        &input,
        "--beta",
        "17/20",
        "--target",
        "1",
    ]);
    let b = ncg(&[
        "centrality",
        "-i",
        &input,
        "--beta",
        "0.85",
        "--target",
        "1",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    // Cyclic symmetry: every node has centrality 1/3.
    assert_eq!(json(&a)["pi"], serde_json::json!(["1/3", "1/3", "1/3"]));
}

#[test]
fn centrality_csv_and_float_backend() {
    let dir = scratch("csv");
    let input = write(&dir, "bf.json", BUTTERFLY);
    let out = ncg(&[
        "centrality",
        "-i",
        &input,
        "--format",
        "csv",
        "--target",
        "3",
    ]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("node,pi,tau"));
    assert_eq!(lines.next(), Some("1,19/125,20/7"));
    assert_eq!(text.lines().nth(3), Some("3,7/25,0"));
    let out = ncg(&["centrality", "-i", &input, "--backend", "float"]);
    let pi = json(&out)["pi"][2].as_f64().unwrap();
    assert!((pi - 0.28).abs() < 1e-12);
}

#[test]
fn best_response_lists_all_ties() {
    let dir = scratch("br");
    let input = write(&dir, "bf.json", BUTTERFLY);
    let out = ncg(&["best-response", "-i", &input, "--player", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["count"], 6);
    assert_eq!(v["objective"], "40/7");
    assert_eq!(v["current_is_best"], true);
}

#[test]
fn dot_and_manifest_are_written() {
    let dir = scratch("dot");
    let input = write(&dir, "bf.json", BUTTERFLY);
    let dot = dir.join("g.dot");
    let result = dir.join("report.json");
    let out = ncg(&[
        "classify",
        "-i",
        &input,
        "--dot",
        dot.to_str().unwrap(),
        "-o",
        result.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.contains("2 -> 3 [dir=none];"));
    assert!(text.contains("1 -> 3;"));
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.join("report.json.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["subcommand"], "classify");
    assert_eq!(manifest["backend"], "rational");
    assert_eq!(manifest["game"]["beta"], "1/2");
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_m1_passes() {
    let out = ncg(&["verify-theorems", "--n", "4", "--m", "1", "--beta", "1/2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("PASS strict count"));
}

#[test]
fn verify_m2_reports_the_kite_equilibria() {
    // Exact enumeration finds equilibria with a 4-node sink component that is
    // neither a ring nor the Butterfly, so this check fails honestly.
    let out = ncg(&["verify-theorems", "--n", "5", "--m", "2", "--beta", "1/2"]);
    assert_eq!(out.status.code(), Some(4));
    let table = stdout(&out);
    assert!(table.contains("PASS strict set = ring unions"), "{table}");
    assert!(
        table.contains("FAIL nash pass condensation conditions"),
        "{table}"
    );
    assert!(
        table.contains("PASS ring attachments are not nash"),
        "{table}"
    );
}

#[test]
fn enumerate_guards_large_spaces() {
    let out = ncg(&["enumerate-ne", "--n", "6", "--m", "2", "--beta", "1/2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--large"));
    let out = ncg(&[
        "enumerate-ne",
        "--n",
        "4",
        "--m",
        "1",
        "--beta",
        "1/2",
        "--eta",
        "1/10,2/10,3/10,4/10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["nash"].as_array().unwrap().len(), 27);
    assert_eq!(v["strict"].as_array().unwrap().len(), 3);
}

#[test]
fn simulate_is_deterministic() {
    let dir = scratch("sim");
    let mut csvs = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.join(run);
        let out = ncg(&[
            "simulate",
            "--n",
            "7",
            "--m",
            "1",
            "--beta",
            "1/2",
            "--seed",
            "5",
            "--seeds-count",
            "3",
            "--max-steps",
            "5000",
            "--backend",
            "float",
            "--out-dir",
            out_dir.to_str().unwrap(),
            "--jobs",
            "2",
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let summaries = json(&out);
        assert_eq!(summaries.as_array().unwrap().len(), 3);
        assert_eq!(summaries[0]["verdict"], "AbsorbedClass");
        assert_eq!(summaries[0]["terminal_tag"], "C2lr(3,1)");
        csvs.push(std::fs::read(out_dir.join("seed-6.csv")).unwrap());
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
                .unwrap();
        assert_eq!(manifest["seeds"], serde_json::json!([5, 6, 7]));
    }
    assert_eq!(csvs[0], csvs[1]);
    let text = String::from_utf8(csvs[0].clone()).unwrap();
    assert!(text.starts_with("t,player,action,class\n"));
}

#[test]
fn simulate_from_file_with_snapshots() {
    let dir = scratch("simfile");
    let ring = r#"{"n":5,"m":2,"beta":"1/2","actions":[[2,5],[1,3],[2,4],[3,5],[4,1]]}"#;
    let init = write(&dir, "ring.json", ring);
    let out_dir = dir.join("out");
    let out = ncg(&[
        "simulate",
        "--init",
        &init,
        "--out-dir",
        out_dir.to_str().unwrap(),
        "--dot-every",
        "20",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let summary = json(&out);
    assert_eq!(summary[0]["verdict"], "AbsorbedStrict");
    assert_eq!(summary[0]["terminal_tag"], "RingUnion(5)");
    assert!(out_dir.join("seed-0-t0000000.dot").exists());
    assert!(out_dir.join("seed-0-t0000020.dot").exists());
    let out = ncg(&["simulate", "--init", &init, "--n", "6"]);
    assert_eq!(out.status.code(), Some(1));
}
