use std::process::{Command, Output};

use aqg_core::examples::{make_group_algebra, FiniteGroup};
use aqg_core::hopf::file::write_presentation;

fn aqg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aqg")).args(args).env_remove("AQG_DEFAULT_TOLERANCE").output().expect("binary runs")
}

fn json(path: &std::path::Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn cyclic_group_algebra_passes_with_exact_zero_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let md = dir.path().join("r.md");
    let o = aqg(&["verify", "--example", "group:C[Z8]", "--suite", "all", "--report-json", out.to_str().unwrap(), "--report-md", md.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v = json(&out);
    assert_eq!(v["schema"], "aqg-report v1");
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() > 50);
    for c in checks {
        assert!(!c["anchor"].as_str().unwrap().is_empty());
        if c["tier"] == "exact" && c["status"] == "pass" {
            assert_eq!(c["residual"], "0", "{c}");
        }
    }
    let ids: Vec<&str> = checks.iter().map(|c| c["id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    let text = std::fs::read_to_string(&md).unwrap();
    for section in ["## Section 1", "## Section 2", "## Section A"] {
        assert!(text.contains(section), "{section}");
    }
}

#[test]
fn exact_polar_needs_a_rational_square() {
    let o = aqg(&["verify", "--example", "suq2", "--q", "3/7", "--suite", "gns", "--exact-polar"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rational square"));
}

#[test]
fn unknown_suite_and_example_are_usage_errors() {
    assert_eq!(aqg(&["verify", "--suite", "everything"]).status.code(), Some(2));
    assert_eq!(aqg(&["verify", "--example", "group:C[Q8]"]).status.code(), Some(2));
    assert_eq!(aqg(&["verify", "--example", "suq2", "--q", "2"]).status.code(), Some(2));
    assert_eq!(aqg(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = aqg(&["verify", "--example", "group:F[S3]", "--suite", "modular", "--seed", "7", "--report-json", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(p).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn tolerance_comes_from_the_environment_when_not_given() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    let o = Command::new(env!("CARGO_BIN_EXE_aqg"))
        .args(["verify", "--example", "group:C[Z2]", "--suite", "axioms", "--report-json", p.to_str().unwrap()])
        .env("AQG_DEFAULT_TOLERANCE", "1e-6")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&p)["environment"]["tolerance"], 1e-6);
    let o = aqg(&["verify", "--example", "group:C[Z2]", "--suite", "axioms", "--tolerance", "1e-3", "--report-json", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&p)["environment"]["tolerance"], 1e-3);
}

#[test]
fn presentation_files_round_trip_and_corruption_fails() {
    let dir = tempfile::tempdir().unwrap();
    let text = write_presentation(&make_group_algebra(&FiniteGroup::cyclic(4))).unwrap();
    let good = dir.path().join("z4.txt");
    std::fs::write(&good, &text).unwrap();
    let o = aqg(&["verify", "--presentation-file", good.to_str().unwrap(), "--suite", "all"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, text.replace("u_g u_g u_g2 1", "u_g u_g u_g3 1")).unwrap();
    let o = aqg(&["verify", "--presentation-file", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("axioms."));

    let junk = dir.path().join("junk.txt");
    std::fs::write(&junk, "not a presentation").unwrap();
    assert_eq!(aqg(&["verify", "--presentation-file", junk.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn coverage_audit_is_empty() {
    let o = aqg(&["coverage"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.contains("unmapped: 0"));
    assert!(!text.contains("UNMAPPED"));
}

#[test]
fn failures_print_witnesses_and_exit_one() {
    // A tolerance of zero cannot hold for the float DFT check on Z8.
    let o = aqg(&["verify", "--example", "group:C[Z8]", "--suite", "duality", "--tolerance", "0", "--quiet"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(1), "{text}");
    assert!(text.contains("FAIL  duality.dft"));
    assert!(text.contains("witness:"));
}
