use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use randop_core::cli::{self, Failure, RunError};
use serde_json::Value;

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn randop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_randop"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(name: &str) -> String {
    scenarios().join(name).to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn run_report(name: &str, extra: &[&str]) -> Value {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let mut args = vec!["run", &path(name) as &str, "--report", out.to_str().unwrap()]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
    args.extend(extra.iter().map(|s| s.to_string()));
    let o = randop(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(o.status.success(), "{}", stderr(&o));
    serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap()
}

#[test]
fn validate_accepts_s3() {
    let o = randop(&["validate", &path("s3.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("ok"));
}

#[test]
fn invalid_scenarios_name_the_field() {
    let cases = [
        ("duplicate_atom.json", "space[1].id"),
        ("zero_rank_one.json", "operator[2].map.output"),
        ("mass_sum.json", "deficit 1/10"),
        ("bad_rational.json", "space[1].mass"),
    ];
    for (file, needle) in cases {
        for cmd in ["validate", "run"] {
            let o = randop(&[cmd, &path(&format!("invalid/{file}"))]);
            assert_eq!(o.status.code(), Some(2), "{cmd} {file}");
            assert!(stderr(&o).contains(needle), "{cmd} {file}: {}", stderr(&o));
        }
    }
    let o = randop(&["validate", &path("invalid/zero_rank_one.json")]);
    assert!(stderr(&o).contains("nonzero"));
}

#[test]
fn unreadable_and_malformed_files_exit_2() {
    let o = randop(&["validate", "/nonexistent/scenario.json"]);
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.json");
    std::fs::write(&f, "{\n  \"name\": \"x\",\n  \"space\": [\n").unwrap();
    let o = randop(&["validate", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
    std::fs::write(&f, r#"{"name": "x", "space": [], "domain": {"kind": "c00"}, "codomain": {"kind": "c00"}, "operator": [], "colour": 1}"#).unwrap();
    let o = randop(&["validate", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"), "{}", stderr(&o));
}

#[test]
fn unknown_analysis_exits_2() {
    let o = randop(&["run", &path("s1.json"), "--analysis", "spectrum"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--analysis"));
    assert!(stderr(&o).contains("spectrum"));
}

#[test]
fn s2_alpha_report() {
    let r = run_report("s2.json", &["--analysis", "alpha"]);
    assert_eq!(r["schema_version"], "1");
    let a = &r["results"][0];
    assert_eq!(a["kind"], "alpha");
    assert_eq!(a["alpha_t"], "4/5");
    assert_eq!(a["method"], "exact");
    assert_eq!(r["results"].as_array().unwrap().len(), 1);
}

#[test]
fn s4_closed_graph_report() {
    let r = run_report("s4.json", &["--analysis", "closed_graph"]);
    let g = &r["results"][0];
    assert_eq!(g["status"], "converse_gap");
    assert_eq!(g["alpha_lower"], "7/10");
    assert_eq!(g["closed_graph_upper"], "1");
    assert_eq!(g["domain_complete"], false);
}

#[test]
fn s3_reports_separating_element_and_corruption() {
    let r = run_report("s3.json", &[]);
    let g = r["results"].as_array().unwrap().iter().find(|v| v["kind"] == "closed_graph").unwrap();
    assert_eq!(g["status"], "consistent");
    let detected = &g["probes"][0]["limit"];
    assert_eq!(detected["status"], "detected");
    assert_eq!(detected["p_zero"], "4/5");
    assert_eq!(detected["y"][2]["value"]["1"], "1");
    let c = run_report("s3_corrupted.json", &["--analysis", "linearity"]);
    assert_eq!(c["results"][0]["inputs"][0]["probability"], "4/5");
}

#[test]
fn analysis_flag_overrides_and_probe_override_is_reported() {
    let r = run_report("s1.json", &["--analysis", "conditional", "--analysis", "alpha", "--probe-basis-max", "5"]);
    let kinds: Vec<&str> = r["results"].as_array().unwrap().iter().map(|v| v["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["conditional", "alpha"]);
    assert_eq!(r["summary"]["probe_config"]["basis_max"], 5);
}

#[test]
fn golden_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["s1", "s2", "s3", "s3_corrupted", "s4"] {
        let a = dir.path().join(format!("{name}.a.json"));
        let b = dir.path().join(format!("{name}.b.json"));
        for out in [&a, &b] {
            let o = randop(&["run", &path(&format!("{name}.json")), "--report", out.to_str().unwrap()]);
            assert!(o.status.success(), "{name}: {}", stderr(&o));
        }
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{name}");
    }
}

#[test]
fn canonical_form_is_stable() {
    for name in ["s1", "s2", "s3", "s3_corrupted", "s4"] {
        let o = randop(&["validate", "--canonical", &path(&format!("{name}.json"))]);
        assert!(o.status.success());
        let canon = String::from_utf8(o.stdout).unwrap();
        let doc = cli::parse_doc(&canon).unwrap();
        assert_eq!(cli::to_canonical(&doc).trim_end(), canon.trim_end());
        let original = cli::parse_doc(&std::fs::read_to_string(path(&format!("{name}.json"))).unwrap()).unwrap();
        assert_eq!(doc, original);
    }
}

#[test]
fn invariant_failures_map_to_exit_3() {
    let f: Failure = RunError::Invariant("forward closed graph failed".into()).into();
    assert_eq!(f.code, cli::EXIT_INVARIANT);
    assert_eq!(cli::EXIT_INVARIANT, 3);
    assert!(f.message.contains("invariant violation"));
}
