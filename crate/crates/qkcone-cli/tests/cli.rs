use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn qk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qk-cone")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const P1: &str = r#"{"kind":"projective","dims":[1]}"#;
const EULER_O1: &str = r#"[{"stage":"twist","kind":"euler","bundle":{"summands":[{"sign":1,"exps":[1]}]}}]"#;

#[test]
fn euler_twist_leaves_the_trivial_seed_unchanged() {
    let plain = qk(&["--target", P1, "--input", "P1-trivial", "--pipeline", "[]"]);
    let twisted = qk(&["--target", P1, "--input", "P1-trivial", "--pipeline", EULER_O1]);
    assert_eq!(twisted.status.code(), Some(0));
    let (a, b) = (json_of(&plain), json_of(&twisted));
    assert_eq!(a["result"], b["result"]);
    assert_eq!(b["provenance"][0]["formula"], "twist/euler-multiplier");
    assert_eq!(b["input"]["source"], "seed:P1-trivial");
    assert!(b["input"]["convention"].is_string());
}

#[test]
fn empty_pipeline_copies_the_input() {
    let out = qk(&["--target", &data("p1_target.json"), "--input", &data("p1_input.json")]);
    assert_eq!(out.status.code(), Some(0));
    let input: Value = serde_json::from_str(&std::fs::read_to_string(data("p1_input.json")).unwrap()).unwrap();
    let doc = json_of(&out);
    assert_eq!(doc["result"], input);
    assert_eq!(doc["provenance"], Value::Array(vec![]));
}

#[test]
fn qsd_mu_matches_the_golden_file() {
    let out = qk(&[
        "--target",
        &data("p1_target.json"),
        "--input",
        &data("p1_input.json"),
        "--pipeline",
        &data("qsd_mu_pipeline.json"),
        "--dmax",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let golden: Value = serde_json::from_str(&std::fs::read_to_string(data("qsd_mu_golden.json")).unwrap()).unwrap();
    let doc = json_of(&out);
    assert_eq!(doc["result"]["D_max"], 3);
    assert_eq!(doc["result"], golden);
    assert_eq!(doc["provenance"][0]["formula"], "qsd/form-mu");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let path = dir.path().join(format!("run{}.json", i));
            let out = qk(&[
                "--target",
                &data("p1_target.json"),
                "--input",
                &data("p1_input.json"),
                "--pipeline",
                &data("qsd_muinv_pipeline.json"),
                "--out",
                path.to_str().unwrap(),
            ]);
            assert_eq!(out.status.code(), Some(0));
            assert!(out.stdout.is_empty());
            std::fs::read(path).unwrap()
        })
        .collect();
    assert!(!runs[0].is_empty());
    assert_eq!(runs[0], runs[1]);
    let suites: Vec<Vec<u8>> = (0..2).map(|_| qk(&["--target", P1, "--suite", "level-identity"]).stdout).collect();
    assert_eq!(suites[0], suites[1]);
}

#[test]
fn exit_codes() {
    assert_eq!(qk(&["--target", P1, "--suite", "level-identity"]).status.code(), Some(0));

    let bad = qk(&["--target", &data("p1_target.json"), "--input", &data("p1_outside_pole.json"), "--suite", "split"]);
    assert_eq!(bad.status.code(), Some(1));
    let doc = json_of(&bad);
    assert_eq!(doc["report"]["pass"], false);
    assert_eq!(doc["report"]["failed"], 1);

    assert_eq!(qk(&["--target", P1, "--suite", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(qk(&["--target", "/nonexistent/target.json", "--suite", "split"]).status.code(), Some(2));
    assert_eq!(qk(&["--target", P1, "--input", "P1-trivial", "--format", "yaml"]).status.code(), Some(2));
    assert_eq!(qk(&["--target", P1, "--input", "nope", "--pipeline", "[]"]).status.code(), Some(2));
    let bad_stage = r#"[{"stage":"reduction","map":"sideways"}]"#;
    let out = qk(&["--target", P1, "--input", "P1-trivial", "--pipeline", bad_stage]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stage 0"));
    let other_target = r#"{"kind":"projective","dims":[2]}"#;
    assert_eq!(qk(&["--target", other_target, "--input", &data("p1_input.json")]).status.code(), Some(2));
}

#[test]
fn split_without_input_warns() {
    let out = qk(&["--target", P1, "--suite", "split"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["report"]["cases"], 0);
    assert_eq!(doc["report"]["warnings"][0], "0 cases checked");
}

#[test]
fn input_suites_pass_on_p1() {
    for suite in ["level-identity", "qsd-forms", "split", "omega", "pfd", "pipeline-4-10"] {
        let out = qk(&[
            "--target",
            &data("p1_target.json"),
            "--input",
            &data("p1_input.json"),
            "--dmax",
            "2",
            "--suite",
            suite,
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
        let doc = json_of(&out);
        assert_eq!(doc["report"]["pass"], true);
        assert!(doc["report"]["cases"].as_u64().unwrap() > 0);
    }
}

#[test]
fn gkm_suites_pass_on_p2() {
    let target = r#"{"kind":"gkm-projective","n":2}"#;
    for suite in ["recursion", "transfer", "limits"] {
        let out = qk(&["--target", target, "--suite", suite, "--dmax", "2"]);
        assert_eq!(out.status.code(), Some(0), "{}: {}", suite, String::from_utf8_lossy(&out.stdout));
    }
}
