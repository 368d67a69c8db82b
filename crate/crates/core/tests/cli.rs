use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn amalgam(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_amalgam")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut args = args.to_vec();
    args.push("--json");
    let (code, out, _) = amalgam(&args);
    (code, serde_json::from_str(&out).unwrap())
}

/// Compares against `tests/golden/<name>.json`; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, args: &[&str]) -> i32 {
    let mut args = args.to_vec();
    args.push("--json");
    let (code, out, _) = amalgam(&args);
    // fixture paths differ between checkouts
    let out = out.replace(&fixture(""), "");
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("tests/golden/{name}.json"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &out).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(out, expected, "{name}");
    code
}

const SCHEMA: [&str; 6] = ["verdict", "normal_form", "head", "conjugator", "trace", "reason"];

#[test]
fn golden_outputs() {
    let ex1 = fixture("ex1.group");
    let fix = fixture("fix.group");
    assert_eq!(golden("validate", &["validate", "-g", &ex1]), 0);
    assert_eq!(
        golden("nf_adversarial", &["nf", "-g", &ex1, "-w", "z d x", "--policy", "paper-ex1", "--trace"]),
        0
    );
    assert_eq!(golden("nf_canonical", &["nf", "-g", &ex1, "-w", "z d x", "--trace"]), 0);
    assert_eq!(golden("reduce", &["reduce", "-g", &ex1, "-w", "a^2 z x^-1 d"]), 0);
    assert_eq!(golden("cyclic", &["cyclic", "-g", &ex1, "-w", "y d z y^-1"]), 0);
    assert_eq!(golden("classify_singular", &["classify", "-g", &fix, "-w", "a x"]), 0);
    assert_eq!(golden("classify_regular", &["classify", "-g", &ex1, "-w", "d z"]), 0);
    assert_eq!(golden("transversal", &["transversal", "-g", &ex1]), 0);
    assert_eq!(golden("conj_conjugate", &["conj", "-g", &ex1, "-u", "d z", "-v", "z d"]), 0);
    assert_eq!(golden("conj_undecided", &["conj", "-g", &ex1, "-u", "a^2", "-v", "a^-1 a^2 a"]), 4);
}

#[test]
fn every_command_emits_the_flat_schema() {
    let ex1 = fixture("ex1.group");
    let runs: [&[&str]; 8] = [
        &["validate", "-g", &ex1],
        &["nf", "-g", &ex1, "-w", "a b"],
        &["reduce", "-g", &ex1, "-w", "a b"],
        &["cyclic", "-g", &ex1, "-w", "a b"],
        &["classify", "-g", &ex1, "-w", "a b"],
        &["transversal", "-g", &ex1],
        &["conj", "-g", &ex1, "-u", "a", "-v", "b"],
        &["bench", "paper-ex1", "--p", "2", "--m", "1"],
    ];
    for args in runs {
        let (_, v) = json(args);
        let obj = v.as_object().unwrap();
        for key in SCHEMA {
            assert!(obj.contains_key(key), "{args:?} lacks {key}");
        }
    }
}

#[test]
fn adversarial_trace_on_the_blow_up_fixture() {
    let (code, v) = json(&["nf", "-g", &fixture("ex1.group"), "-w", "z d x", "--policy", "paper-ex1:2", "--trace"]);
    assert_eq!(code, 0);
    assert_eq!(v["trace"], serde_json::json!([1, 2, 4]));
    assert_eq!(v["head"], "x^4");
}

#[test]
fn classify_reports_a_witness() {
    let (code, out, _) = amalgam(&["classify", "-g", &fixture("fix.group"), "-w", "a"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("singular\nwitness: "), "{out}");
}

#[test]
fn undecided_exits_with_four() {
    let (code, out, _) = amalgam(&["conj", "-g", &fixture("ex1.group"), "-u", "a^2", "-v", "a^-1 a^2 a"]);
    assert_eq!(code, 4);
    assert!(out.starts_with("undecided: "), "{out}");
    let (code, out, _) = amalgam(&[
        "conj",
        "-g",
        &fixture("ex1.group"),
        "-u",
        "a^2",
        "-v",
        "a^-1 a^2 a",
        "--oracle",
        "2",
    ]);
    assert_eq!(code, 4);
    assert!(out.contains("bounded search found conjugator"), "{out}");
}

#[test]
fn error_exit_codes() {
    let ex1 = fixture("ex1.group");
    let (code, _, err) = amalgam(&["nf", "-g", &ex1, "-w", "a q"]);
    assert_eq!(code, 2);
    assert!(err.contains("column 3"), "{err}");
    let (code, _, _) = amalgam(&["nf", "-g", &ex1]);
    assert_eq!(code, 2);
    let (code, _, _) = amalgam(&["nf", "-g", &ex1, "-w", "a", "--policy", "paper-ex1:3"]);
    assert_eq!(code, 2);
    let (code, _, _) = amalgam(&["bench", "paper-ex1", "--p", "2", "--m", "11"]);
    assert_eq!(code, 2);
    let (code, _, _) = amalgam(&["validate", "-g", "/nonexistent/group"]);
    assert_eq!(code, 2);

    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.display().to_string()
    };
    let syntax = write("syntax.group", "A: a b\nB: x y\nC: a^2 = q\n");
    let (code, _, err) = amalgam(&["validate", "-g", &syntax]);
    assert_eq!(code, 2);
    assert!(err.contains("line 3, column 10"), "{err}");
    let overlap = write("overlap.group", "A: a b\nB: a y\nC: a = y\n");
    let (code, v) = json(&["validate", "-g", &overlap]);
    assert_eq!(code, 3);
    assert_eq!(v["verdict"], "error");
    let unfaithful = write("unfaithful.group", "A: a b\nB: x y\nC: a = x\nC: a = y\n");
    let (code, _, err) = amalgam(&["validate", "-g", &unfaithful]);
    assert_eq!(code, 3);
    assert!(err.contains("generator pair 2"), "{err}");
}

#[test]
fn bench_reports() {
    let (code, v) = json(&["bench", "paper-ex1", "--p", "2", "--m", "2"]);
    assert_eq!(code, 0);
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports[0]["final_head"], 16);
    assert_eq!(reports[0]["policy"], "paper-ex1:2");
    assert_eq!(reports[1]["policy"], "canonical");
    let (code, v) = json(&["bench", "paper-ex2", "--p", "2", "--n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "equal");
    let (code, v) = json(&["bench", "random", "-g", &fixture("ex1.group"), "--length", "12", "--samples", "20"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["samples"], 20);
}
