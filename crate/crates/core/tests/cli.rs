use std::path::Path;
use std::process::{Command, Output};

use mbverify::cli::{stable_json_text, CacheEntry};

fn mbverify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mbverify"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn list_has_every_identity_with_anchor() {
    let o = mbverify(&["list", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let entries = v.as_array().unwrap();
    assert!(entries.len() >= 12);
    let ids: Vec<&str> = entries.iter().map(|e| e["identity"].as_str().unwrap()).collect();
    for id in ["g1", "g2", "g3", "iw", "g2a", "s1", "s2", "s3", "s4", "s5", "barnes1", "barnes2"] {
        assert!(ids.contains(&id), "{id} missing");
    }
    assert!(entries.iter().all(|e| !e["anchor"].as_str().unwrap().is_empty()));
}

#[test]
fn verify_barnes_inline_params_passes() {
    let o = mbverify(&[
        "verify",
        "--identity",
        "barnes1",
        "--params",
        r#"{"a":[0.5,0.7],"b":[0.6,0.9]}"#,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "pass");
    for key in ["identity", "N", "params", "contour", "lhs", "rhs", "rel_deviation", "nodes", "runtime_s", "anchor"] {
        assert!(v.get(key).is_some(), "{key} missing");
    }
    assert!(String::from_utf8_lossy(&o.stderr).contains("status=pass"));
}

#[test]
fn verify_params_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    std::fs::write(&path, r#"{"a":[0.5,0.7],"b":[0.6,0.9]}"#).unwrap();
    let o = mbverify(&["verify", "--identity", "barnes1", "--params", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
}

#[test]
fn seeded_verify_is_reproducible() {
    let args = ["verify", "--identity", "g1", "--n", "2", "--seed", "7"];
    let a = mbverify(&args);
    let b = mbverify(&args);
    assert_eq!(code(&a), 0);
    let sa = stable_json_text(&String::from_utf8_lossy(&a.stdout)).unwrap();
    let sb = stable_json_text(&String::from_utf8_lossy(&b.stdout)).unwrap();
    assert_eq!(sa, sb);
}

#[test]
fn degenerate_g3_is_a_usage_error() {
    let o = mbverify(&[
        "verify",
        "--identity",
        "g3",
        "--n",
        "1",
        "--params",
        r#"{"alpha":[0.5,0.5],"beta":[0.1]}"#,
    ]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("constraint violated"));
}

#[test]
fn infeasible_offsets_are_inconclusive() {
    let o = mbverify(&[
        "verify",
        "--identity",
        "barnes1",
        "--params",
        r#"{"a":[0.5,0.7],"b":[0.6,0.9]}"#,
        "--offsets",
        "0.8",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(code(&mbverify(&["verify", "--identity", "nope"])), 3);
    assert_eq!(code(&mbverify(&["sweep", "--identity", "barnes1", "--trials", "0"])), 3);
    assert_eq!(code(&mbverify(&["frobnicate"])), 3);
    assert_eq!(code(&mbverify(&["verify", "--identity", "g1", "--n", "9"])), 3);
    assert_eq!(code(&mbverify(&["verify", "--identity", "barnes1", "--method", "simpson"])), 3);
}

#[test]
fn sweep_writes_out_file_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.json");
    let o = mbverify(&[
        "sweep",
        "--identity",
        "barnes1",
        "--trials",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("pass=20"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["pass"], 20);
    assert_eq!(v["entries"].as_array().unwrap().len(), 20);
}

#[test]
fn sweep_output_independent_of_jobs() {
    let run = |jobs: &str| {
        let o = mbverify(&["sweep", "--identity", "g2", "--n", "1", "--trials", "4", "--jobs", jobs]);
        assert_eq!(code(&o), 0);
        stable_json_text(&String::from_utf8_lossy(&o.stdout)).unwrap()
    };
    assert_eq!(run("1"), run("3"));
}

fn cache_files(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

#[test]
fn report_merges_cached_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    for seed in ["1", "2"] {
        let o = mbverify(&["verify", "--identity", "barnes1", "--seed", seed, "--cache-dir", cache]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(cache_files(dir.path()).len(), 2);
    let o = mbverify(&["report", "--cache-dir", cache]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("barnes1")).count(), 2);

    // A copy of one run with an older timestamp loses to the original.
    let first = &cache_files(dir.path())[0];
    let mut entry: CacheEntry = serde_json::from_str(&std::fs::read_to_string(first).unwrap()).unwrap();
    entry.timestamp = 0;
    entry.reports[0].status = mbverify::report::Status::Fail;
    std::fs::write(dir.path().join("copy.json"), serde_json::to_string(&entry).unwrap()).unwrap();
    let o = mbverify(&["report", "--cache-dir", cache]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("barnes1")).count(), 2);
    assert!(!text.contains("fail"));
    assert!(text.contains("duplicate run"));
}

#[test]
fn report_on_empty_cache_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&mbverify(&["report", "--cache-dir", dir.path().to_str().unwrap()])), 3);
}

#[test]
fn halfplane_subcommands_pass() {
    for sub in ["chain-rule", "transition"] {
        let o = mbverify(&["halfplane", sub]);
        assert_eq!(code(&o), 0, "{sub}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = mbverify(&["halfplane", "chain-rule", "--alpha", "[0.3,0]"]);
    assert_eq!(code(&o), 3);
}
