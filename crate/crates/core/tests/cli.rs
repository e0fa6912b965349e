use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn pgo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pgo"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .env_remove("PGO_PRIME")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pgo-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn classify_row8_diagram() {
    let r = json_of(&pgo(&["classify", "--diagram", "data/fixtures/table1_row8.json"]));
    assert_eq!(r["descriptor"]["case_id"], "8");
    assert_eq!(r["rank"], 2);
    assert!(r["summary"]["open_orbits"].as_u64().unwrap() > 0);
}

#[test]
fn descriptor_round_trip_is_idempotent() {
    let first = pgo(&["classify", "--diagram", "data/fixtures/table1_row11_n4.json"]);
    let report = json_of(&first);
    let path = scratch("row11.json", &String::from_utf8_lossy(&first.stdout));
    let again = json_of(&pgo(&["classify", "--descriptor", path.to_str().unwrap()]));
    assert_eq!(again, report);
}

#[test]
fn tampered_descriptor_is_rejected() {
    let out = pgo(&["classify", "--diagram", "data/fixtures/table1_row11_n4.json"]);
    let mut report = json_of(&out);
    report["descriptor"]["ell"] = Value::from(99);
    let path = scratch("tampered.json", &report.to_string());
    assert_eq!(pgo(&["classify", "--descriptor", path.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn quaternary_anisotropic_form() {
    let r = json_of(&pgo(&["qform", "classify", "--prime", "5", "--coeffs", "1,-u,-pi,upi"]));
    assert_eq!(r["anisotropic"], true);
    assert_eq!(r["witt_index"], 0);
    assert_eq!(r["rank"], 4);
}

#[test]
fn symplectic_enumeration_matches_formula() {
    let r = json_of(&pgo(&["orbit", "enumerate", "--tag", "sp", "--n", "3"]));
    assert_eq!(r["nonzero_classes"], 7);
    assert_eq!(r["predicted_nonzero"], 7);
}

#[test]
fn orbit_classify_reports_a_representative_in_the_same_orbit() {
    let path = scratch("un.json", r#"{"tag":"unitary","entries":[[0,[1,1]],[[1,-1],0]]}"#);
    let r = json_of(&pgo(&["orbit", "classify", "--matrix", path.to_str().unwrap()]));
    assert_eq!(r["invariant"]["rank"], 2);
    let rep = scratch("un_rep.json", &format!(r#"{{"tag":"unitary","entries":{}}}"#, r["representative"]));
    let again = json_of(&pgo(&["orbit", "classify", "--matrix", rep.to_str().unwrap()]));
    assert_eq!(again["invariant"], r["invariant"]);
}

#[test]
fn psi_check_on_random_samples() {
    let r = json_of(&pgo(&["invariants", "psi-check", "--tag", "sp", "--n", "3", "--samples", "25"]));
    assert_eq!(r["identity_holds"], 25);
    assert_eq!(r["ad_triple_holds"], 25);
}

#[test]
fn table_output_is_flat() {
    let out = pgo(&["--table", "qform", "classify", "--coeffs", "1,1"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().any(|l| l == "witt_index: 1"), "{text}");
}

#[test]
fn exit_codes() {
    assert_eq!(pgo(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(pgo(&["--prime", "4", "enumerate"]).status.code(), Some(2));
    assert_eq!(pgo(&["orbit", "classify", "--matrix", "/does/not/exist.json"]).status.code(), Some(1));
    let bad = scratch("bad.json", r#"{"tag":"sp","entries":[[1,2],[3,4]]}"#);
    assert_eq!(pgo(&["orbit", "classify", "--matrix", bad.to_str().unwrap()]).status.code(), Some(1));
}
