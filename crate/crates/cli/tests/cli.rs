//! Behavior of the `wildrep` binary itself: exit codes, the text summary,
//! JSON report files, dot output, and the realize round trip.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn wildrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wildrep"))
        .args(args)
        .output()
        .expect("the wildrep binary should run")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Scratch directory for one test, removed on drop.
struct Scratch(PathBuf);

impl Scratch {
    fn new(test: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("wildrep-cli-{}-{test}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).expect("scratch dir");
        Scratch(dir)
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let p = self.0.join(name);
        fs::write(&p, contents).expect("scratch file");
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

const PII: &str = "class PII {\n  at inf: <0> {t1:[1]}, <x^(3)> {t2:[1]};\n}\n";

#[test]
fn analyze_prints_the_summary_and_writes_json() {
    let s = Scratch::new("analyze");
    let input = s.file("pii.cls", PII);
    let json = s.path("pii.json");
    let out = wildrep(&[
        "analyze",
        input.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.contains("class PII: k = 2, distinct forests 3"),
        "unexpected summary: {text}"
    );
    assert!(text.contains("dimension: 2"), "missing dimension: {text}");

    let report: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["name"], "PII");
    assert_eq!(report["input"], PII);
    assert_eq!(report["k"], 2);
    assert_eq!(report["readings"].as_array().unwrap().len(), 3);
}

#[test]
fn verified_analyses_say_so() {
    let s = Scratch::new("verify");
    let input = s.file("pii.cls", PII);
    let out = wildrep(&["analyze", input.to_str().unwrap(), "--verify-readings"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(
        stdout(&out).contains("readings verified"),
        "missing verification line: {}",
        stdout(&out)
    );
}

#[test]
fn missing_input_files_exit_2() {
    let out = wildrep(&["analyze", "/no/such/file.cls"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("cannot read"),
        "unexpected message: {}",
        stderr(&out)
    );
}

#[test]
fn syntax_errors_exit_2() {
    let s = Scratch::new("syntax");
    let input = s.file("bad.cls", "class x {");
    let out = wildrep(&["analyze", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("syntax error"),
        "unexpected message: {}",
        stderr(&out)
    );
}

#[test]
fn semantic_errors_exit_3() {
    let s = Scratch::new("semantic");
    let input = s.file("dup.cls", "class x { at inf: <x>; at inf: <0>; }");
    let out = wildrep(&["analyze", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(
        stderr(&out).contains("invalid class"),
        "unexpected message: {}",
        stderr(&out)
    );
}

#[test]
fn excluded_classes_exit_4() {
    let s = Scratch::new("excluded");
    let input = s.file("rank1.cls", "class x { at inf: <x>; }");
    let out = wildrep(&["analyze", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(
        stderr(&out).contains("analysis failed"),
        "unexpected message: {}",
        stderr(&out)
    );
}

#[test]
fn unknown_painleve_names_exit_3() {
    let out = wildrep(&["painleve", "PVII"]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("no class named"), "unexpected message: {err}");
    assert!(err.contains("all"), "should list the known names: {err}");
}

#[test]
fn painleve_lookup_ignores_case_and_reports() {
    let s = Scratch::new("painleve-one");
    let json = s.path("piv.json");
    let out = wildrep(&["painleve", "piv", "--json", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let report: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["schema"], "wildrep-report/1");
    assert_eq!(report["name"], "PIV");
    assert_eq!(report["k"], 3);
    assert_eq!(report["distinct_forests"], 2);
    assert_eq!(report["diagram"]["dimension"], 2);
    assert_eq!(
        report["diagram"]["B"],
        serde_json::json!([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    );
    assert_eq!(report["diagram"]["d"], serde_json::json!([1, 1, 1]));
    assert_eq!(report["readings"].as_array().unwrap().len(), 4);
}

#[test]
fn painleve_all_reports_every_class_in_order() {
    let s = Scratch::new("painleve-all");
    let json = s.path("all.json");
    let out = wildrep(&["painleve", "all", "--json", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let reports: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    let names: Vec<&str> = reports
        .as_array()
        .expect("an array of reports")
        .iter()
        .map(|r| r["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        ["PI", "PII", "PIII2", "PIII1", "PIII0", "PIV", "PV", "PVI"]
    );
}

#[test]
fn dot_files_cover_every_reading() {
    let s = Scratch::new("dots");
    let dir = s.path("dots");
    let out = wildrep(&["painleve", "PII", "--dot-dir", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    for name in ["PII.enriched.dot", "PII.diagram.dot", "PII.reading.generic.dot"] {
        assert!(dir.join(name).is_file(), "missing {name}");
    }
    // one file for the generic reading plus one per nearby reading
    let readings = fs::read_dir(&dir)
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .file_name()
                .to_string_lossy()
                .starts_with("PII.reading.")
        })
        .count();
    assert_eq!(readings, 3);

    let enriched = fs::read_to_string(dir.join("PII.enriched.dot")).unwrap();
    assert!(enriched.starts_with("graph "), "not a dot file: {enriched}");
}

#[test]
fn realized_forests_analyze_cleanly() {
    let s = Scratch::new("realize");
    let json = s.path("pi.json");
    let out = wildrep(&["painleve", "PI", "--json", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let report: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    let forest = s.file(
        "forest.json",
        &report["readings"][0]["forest"].to_string(),
    );
    let out = wildrep(&["realize", forest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let realized = stdout(&out);
    assert!(
        realized.starts_with("class realized {"),
        "unexpected output: {realized}"
    );

    // the printed class is valid input again
    let back = s.file("realized.cls", &realized);
    let out = wildrep(&["analyze", back.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("dimension: 2"));
}

#[test]
fn malformed_forest_json_exits_2() {
    let s = Scratch::new("bad-forest");
    let input = s.file("forest.json", "not json");
    let out = wildrep(&["realize", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("invalid forest JSON"),
        "unexpected message: {}",
        stderr(&out)
    );
}

#[test]
fn stripping_is_a_flag_not_a_default() {
    let s = Scratch::new("unmodified");
    let full = s.file(
        "full.cls",
        "class c {\n  at inf: <x^(3)>, <0>;\n  at 0: <0> #2 {1:[1]; 5:[1]};\n}\n",
    );
    let stripped = s.file(
        "stripped.cls",
        "class c { at inf: <x^(3)>, <0>; at 0: <0> {5:[1]}; }",
    );
    let a = wildrep(&["analyze", full.to_str().unwrap(), "--unmodified"]);
    let b = wildrep(&["analyze", stripped.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0), "stderr: {}", stderr(&a));
    assert_eq!(b.status.code(), Some(0), "stderr: {}", stderr(&b));
    assert_eq!(stdout(&a), stdout(&b));
}
