use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn symorbit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symorbit")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn golden(id: u8) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../data/tables/v1/table{id}.csv"));
    std::fs::read_to_string(path).expect("golden table present")
}

#[test]
fn cohom_reports_both_actions() {
    let out = symorbit(&["cohom", "--space", "SL(3,R)/SO0(1,2)"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["cohom_K"], 2);
    assert_eq!(v["cohom_L"], 1);
    assert_eq!(v["status"], "match");
}

#[test]
fn sl2_has_a_single_positive_root() {
    let v = json_of(&symorbit(&["roots", "--space", "SL(2,R)/SO0(1,1)"]));
    assert_eq!(v["rank"], 1);
    let pos: Vec<&Value> = v["roots"].as_array().unwrap().iter().filter(|r| r["positive"] == true).collect();
    assert_eq!(pos.len(), 1);
    assert_eq!(pos[0]["mult"], 1);
    assert_eq!(v["cartan_basis"].as_array().unwrap().len(), 1);
}

#[test]
fn output_is_byte_stable_per_seed() {
    let args = ["spectrum", "--space", "SU(1,2)/S(U(0,1)xU(1,1))", "--seed", "7"];
    let a = symorbit(&args);
    let b = symorbit(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = symorbit(&["spectrum", "--space", "SU(1,2)/S(U(0,1)xU(1,1))", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn explicit_coordinates_are_echoed() {
    let v = json_of(&symorbit(&["focal", "--space", "SL(2,R)/SO0(1,1)", "--w", "0.3", "--a", "1", "--window", "4"]));
    assert_eq!(v["w"][0], 0.3);
    let pts = v["focal"]["points"].as_array().unwrap();
    assert_eq!(pts.len(), 5);
    for p in pts {
        assert_eq!(p["z"]["re"], -0.3);
    }
}

#[test]
fn hermann_spectrum_uses_sigma_prime() {
    let out = symorbit(&["spectrum", "--space", "SL(3,R)/SO0(1,2)", "--sigma-prime", "ad[I(1,2)]", "--w", "0.2", "--a", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json_of(&out);
    assert!(!v["entries"].as_array().unwrap().is_empty());
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["roots"],
        vec!["roots", "--space", "no-slash"],
        vec!["spectrum", "--space", "SL(3,R)/SO0(1,2)", "--w", "1,abc"],
        vec!["verify", "--suite", "nonsense"],
        vec!["frobnicate"],
    ] {
        assert_eq!(symorbit(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn computation_errors_exit_1_with_kind() {
    let cases = [
        (vec!["cohom", "--space", "SL(3,R)/SO(7)"], "UnsupportedSigma"),
        (vec!["table", "--id", "4", "--bound", "2"], "UnsupportedFamily"),
        (vec!["table", "--id", "1", "--bound", "9"], "InvalidParams"),
        (vec!["spectrum", "--space", "SL(3,R)/SO0(1,2)", "--w", "1"], "InvalidParams"),
    ];
    for (args, kind) in cases {
        let out = symorbit(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let v = json_of(&out);
        assert_eq!(v["kind"], kind);
        assert!(v["message"].is_string());
    }
}

#[test]
fn near_lattice_w_is_refused() {
    // root value 1e-7: too close to the lattice to trust, too far to snap onto it
    let out = symorbit(&["spectrum", "--space", "SL(2,R)/SO0(1,1)", "--w", "5e-8", "--a", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["kind"], "SingularDirection");
}

#[test]
fn orbit_through_origin_has_no_tangent_roots() {
    let v = json_of(&symorbit(&["spectrum", "--space", "SL(2,R)/SO0(1,1)", "--w", "0", "--a", "1"]));
    assert!(v["entries"].as_array().unwrap().is_empty());
}

#[test]
fn table_csv_matches_golden() {
    for id in 1..=3u8 {
        let out = symorbit(&["table", "--id", &id.to_string(), "--bound", "6", "--csv"]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(String::from_utf8(out.stdout).unwrap(), golden(id), "table {id}");
    }
}

#[test]
fn verify_suite_passes() {
    let out = symorbit(&["verify", "--suite", "all", "--max-dim", "20"]);
    let v = json_of(&out);
    assert_eq!(out.status.code(), Some(0), "{v}");
    assert_eq!(v["pass"], true);
    assert_eq!(v["suites"].as_array().unwrap().len(), 5);
}

#[test]
fn verify_skips_large_algebras() {
    let v = json_of(&symorbit(&["verify", "--suite", "roots", "--max-dim", "8"]));
    let skipped = v["suites"][0]["skipped"].as_array().unwrap();
    assert!(skipped.iter().any(|s| s.as_str().unwrap().starts_with("SL(3,C)")));
}

#[test]
fn listing_without_space() {
    let v = json_of(&symorbit(&["pairs", "--id", "3", "--bound", "2"]));
    let spaces = v["spaces"].as_array().unwrap();
    assert!(!spaces.is_empty());
    assert!(spaces.iter().all(|s| s["table"] == 3));
}
