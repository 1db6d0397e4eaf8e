use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn corpus_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../solenoid/corpus").join(format!("{name}.sol"))
}

fn solenoid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_solenoid")).args(args).output().expect("binary runs")
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(bytes)))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_w4_reports_two_torsion_k1() {
    let out = solenoid(&["analyze", path_str(&corpus_file("w4"))]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out.stdout);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["k_theory"]["heteroclinic"]["k1"]["description"], "ℤ/2");
    assert_eq!(r["k_theory"]["heteroclinic"]["k1"]["torsion"], serde_json::json!(["2"]));
    assert_eq!(r["orientation"]["oriented"], false);
    assert_eq!(r["k_theory"]["parity_obstruction"]["unsat"], true);
    assert_eq!(r["dihedral"]["minimality"]["verdict"], "phi_minimal");
    assert_eq!(r["input"]["name"], "w4");
    assert!(r.get("timings_ms").is_none());
}

#[test]
fn validate_disjoint_fails_mixing_with_exit_one() {
    let out = solenoid(&["validate", path_str(&corpus_file("disjoint"))]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out.stdout);
    assert_eq!(report["axioms"]["failures"], serde_json::json!(["mixing"]));
    let err = json(&out.stderr);
    assert_eq!(err["error"]["kind"], "validation");
    assert_eq!(err["error"]["exit_code"], 1);
}

#[test]
fn corpus_matches_goldens() {
    let out = solenoid(&["corpus"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out.stdout);
    assert_eq!(r["ok"], true);
    assert_eq!(r["entries"].as_array().unwrap().len(), 6);
}

#[test]
fn corpus_flags_a_changed_golden() {
    let dir = tempfile::tempdir().unwrap();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("golden");
    for entry in fs::read_dir(&golden).unwrap() {
        let p = entry.unwrap().path();
        fs::copy(&p, dir.path().join(p.file_name().unwrap())).unwrap();
    }
    let w1 = dir.path().join("w1.json");
    let text = fs::read_to_string(&w1).unwrap().replacen("\"w1\"", "\"w1-edited\"", 1);
    fs::write(&w1, text).unwrap();
    fs::remove_file(dir.path().join("dyadic.json")).unwrap();
    let out = solenoid(&["corpus", "--golden", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("w1 (differs)") && stderr.contains("dyadic (missing)"), "{stderr}");
}

#[test]
fn usage_errors_exit_two_with_json_on_stderr() {
    for args in [&["frobnicate"][..], &["--precision", "3", "validate", "x.sol"], &["validate", "/nonexistent/x.sol"]] {
        let out = solenoid(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = json(&out.stderr);
        assert_eq!(err["error"]["kind"], "usage");
        assert_eq!(err["schema"], 1);
        assert!(out.stdout.is_empty());
    }
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.sol");
    fs::write(&bad, "edges: a\nrule a = a b\n").unwrap();
    let out = solenoid(&["validate", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out.stderr)["error"]["message"].as_str().unwrap().contains("bad"));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(solenoid(&["--help"]).status.code(), Some(0));
    let v = solenoid(&["--version"]);
    assert_eq!(v.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&v.stdout).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn out_dir_gets_reports_and_a_stabilization_cache() {
    let dir = tempfile::tempdir().unwrap();
    let file = corpus_file("w2");
    let first = solenoid(&["--out", path_str(dir.path()), "ktheory", path_str(&file)]);
    assert_eq!(first.status.code(), Some(0));
    let report = dir.path().join("w2.ktheory.json");
    assert_eq!(fs::read(&report).unwrap(), first.stdout);
    let cached: Vec<_> = fs::read_dir(dir.path().join("cache")).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(cached.len(), 1);
    let entry = json(&fs::read(&cached[0]).unwrap());
    assert_eq!(entry["stabilization_power"], 2);
    // A cache hit gives a byte-identical report.
    let second = solenoid(&["--out", path_str(dir.path()), "ktheory", path_str(&file)]);
    assert_eq!(first.stdout, second.stdout);
    // So does running without a cache.
    assert_eq!(solenoid(&["ktheory", path_str(&file)]).stdout, first.stdout);
}

#[test]
fn markdown_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = solenoid(&["--format", "md", "--out", path_str(dir.path()), "validate", path_str(&corpus_file("w1"))]);
    assert_eq!(out.status.code(), Some(0));
    let md = String::from_utf8(out.stdout).unwrap();
    assert!(md.starts_with("# solenoid validate: w1\n"), "{md}");
    assert!(md.contains("## axioms") && md.contains("## orientation"));
    assert_eq!(fs::read_to_string(dir.path().join("w1.validate.md")).unwrap(), md);
}

#[test]
fn timings_are_opt_in() {
    let out = solenoid(&["--timings", "validate", path_str(&corpus_file("w1"))]);
    assert!(json(&out.stdout)["timings_ms"]["axioms"].is_u64());
}

#[test]
fn dihedral_echoes_depth_and_seed() {
    let out = solenoid(&["dihedral", "--depth", "4", "--seed", "17", path_str(&corpus_file("w1"))]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out.stdout);
    assert_eq!(r["options"]["depth"], 4);
    assert_eq!(r["dihedral"]["freeness"]["seed"], 17);
    assert_eq!(r["dihedral"]["freeness"]["pass"], true);
    assert_eq!(r["dihedral"]["minimality"]["verdict"], "invariant_clopen");
    assert!(r.get("k_theory").is_none());
}

#[test]
fn compare_matrices_and_rules() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    };
    let a = write("a.json", "[[2, 1], [1, 1]]");
    let b = write("b.json", "[[1, 1], [1, 2]]");
    let out = solenoid(&["compare", path_str(&a), path_str(&b)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out.stdout)["comparison"]["verdict"], "isomorphic");

    let w3 = corpus_file("w3");
    let out = solenoid(&["compare", path_str(&w3), path_str(&w3)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out.stdout);
    assert_eq!(r["inputs"][0]["matrix"], serde_json::json!([[65, 7], [24, 67]]));
    assert_eq!(r["comparison"]["verdict"], "isomorphic");

    let big = write("big.json", "[[1, 2, 3], [1, 1, 1], [0, 0, 1]]");
    let out = solenoid(&["compare", path_str(&a), path_str(&big)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out.stderr)["error"]["message"].as_str().unwrap().contains("2×2"));

    let ragged = write("ragged.json", "[[1, 2], [3]]");
    assert_eq!(solenoid(&["compare", path_str(&a), path_str(&ragged)]).status.code(), Some(2));
}
