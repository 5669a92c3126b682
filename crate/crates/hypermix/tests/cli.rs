use std::process::{Command, Output};

fn hypermix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypermix")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json artifact")
}

#[test]
fn hm_witness_for_the_constant_target() {
    let out = hypermix(&["witness-hm", "--op", "derivative", "--center", "0", "--radius", "0.5", "--target", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["N"], 3);
    assert_eq!(v["bound_mode"], "analytic");
}

#[test]
fn missing_witness_exits_2() {
    let out = hypermix(&["witness-hm", "--op", "derivative", "--center", "0", "--radius", "0.01", "--target", "1", "--n-max", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"], "NO_WITNESS_IN_RANGE");
}

#[test]
fn failing_decay_verdict_exits_2() {
    let out = hypermix(&[
        "decay", "--op", "translation-lp", "--w", "2", "--a", "1", "--p", "1", "--x", "chi(0,1)", "--y", "chi(0,1)",
        "--n-max", "8",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("n,s_norm,kernel_gap,combined\n"));
}

#[test]
fn malformed_input_exits_1() {
    for args in [
        &["witness-stt", "--op", "derivative", "--center", "1 +", "--radius", "1", "--target", "1"][..],
        &["density", "--op", "translation-lp", "--w", "0.5", "--a", "1", "--x", "chi(0,1)"],
        &["decay", "--op", "translation-c0", "--w", "2", "--a", "1", "--x", "chi(0,1)", "--y", "0"],
        &["leading-poly", "--alpha", "0", "--center", "0", "--radius", "1"],
    ] {
        let out = hypermix(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn descriptor_diagnostics_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"command": "witness-zero", "op": "derivative", "inputs": {"radius": "wide"}}"#).unwrap();
    let out = hypermix(&["--from-file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/inputs/radius"));
}
