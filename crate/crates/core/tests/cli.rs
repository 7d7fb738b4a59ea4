use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ph_feedback::cli::{EXIT_ERROR, EXIT_FAILED, EXIT_OK};
use ph_feedback::io::{load_system, AnalysisReport, SynthesisReport};

fn phfb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phfb")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn scalar(dir: &Path, name: &str, r: f64, d: f64) -> PathBuf {
    let path = dir.join(name);
    let text = format!(
        r#"{{"n":1,"m":1,"E":[[1.0]],"J":[[0.0]],"R":[[{r:?}]],"G":[[1.0]],"P":[[0.0]],"D":[[{d:?}]]}}"#
    );
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let good = scalar(dir.path(), "good.json", 1.0, 0.0);
    assert_eq!(code(&phfb(&["validate", "--input", s(&good)])), EXIT_OK);
    let bad = scalar(dir.path(), "bad.json", -1.0, 0.0);
    assert_eq!(code(&phfb(&["validate", "--input", s(&bad)])), EXIT_FAILED);
}

#[test]
fn passify_refuses_singular_feedthrough() {
    let dir = tempfile::tempdir().unwrap();
    let sys = scalar(dir.path(), "sys.json", 1.0, 0.0);
    let out = phfb(&["passify", "--input", s(&sys)]);
    assert_eq!(code(&out), EXIT_FAILED);
    let report: SynthesisReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.feedback.is_none());
    assert!(report.status.contains("S not positive definite"), "{}", report.status);
}

#[test]
fn stabilize_refuses_uncontrollable_axis_mode() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("osc.json");
    let text = r#"{"n":2,"m":1,"E":[[1.0,0.0],[0.0,1.0]],"J":[[0.0,1.0],[-1.0,0.0]],
        "R":[[0.0,0.0],[0.0,0.0]],"G":[[0.0],[0.0]],"P":[[0.0],[0.0]],"D":[[0.0]]}"#;
    fs::write(&path, text).unwrap();
    let out = phfb(&["stabilize", "--input", s(&path)]);
    assert_eq!(code(&out), EXIT_FAILED);
    let report: SynthesisReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!report.witnesses.is_empty());
    assert!(report.witnesses.iter().all(|w| w.re.abs() < 1e-8 && (w.im.abs() - 1.0).abs() < 1e-8));
}

#[test]
fn errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(code(&phfb(&["validate", "--input", s(&missing)])), EXIT_ERROR);
    let garbled = dir.path().join("garbled.json");
    fs::write(&garbled, "{ not json").unwrap();
    assert_eq!(code(&phfb(&["analyze", "--input", s(&garbled)])), EXIT_ERROR);
    assert_eq!(code(&phfb(&["frobnicate"])), EXIT_ERROR);
    let sys = scalar(dir.path(), "sys.json", 1.0, 0.0);
    assert_eq!(code(&phfb(&["--tol", "-1", "validate", "--input", s(&sys)])), EXIT_ERROR);
}

#[test]
fn gen_then_analyze_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = phfb(&["gen", "--n", "5", "--m", "2", "--seed", "42", "--rank-e", "3", "--output", s(p)]);
        assert_eq!(code(&out), EXIT_OK);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let (_, meta) = load_system(&a).unwrap();
    assert_eq!(meta.unwrap().seed, Some(42));

    let r1 = phfb(&["analyze", "--input", s(&a)]);
    let r2 = phfb(&["analyze", "--input", s(&b)]);
    assert_eq!(code(&r1), EXIT_OK);
    assert_eq!(r1.stdout, r2.stdout);
    let report: AnalysisReport = serde_json::from_slice(&r1.stdout).unwrap();
    assert!(report.pencil.regular);
    assert_eq!(report.pencil.rank_e, 3);
}

#[test]
fn gen_rejects_infeasible_knobs() {
    let out = phfb(&["gen", "--n", "1", "--m", "1", "--axis-modes"]);
    assert_eq!(code(&out), EXIT_ERROR);
}

#[test]
fn stabilize_certify_simulate_chain() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("sys.json");
    assert_eq!(code(&phfb(&["gen", "--n", "4", "--m", "2", "--seed", "3", "--output", s(&sys)])), EXIT_OK);
    let f = dir.path().join("f.json");
    let out = phfb(&["stabilize", "--input", s(&sys), "--feedback-out", s(&f)]);
    assert_eq!(code(&out), EXIT_OK, "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(code(&phfb(&["certify", "--input", s(&sys), "--feedback", s(&f)])), EXIT_OK);

    let csv = dir.path().join("traj.csv");
    let rep = dir.path().join("sim.json");
    let out = phfb(&[
        "simulate", "--input", s(&sys), "--feedback", s(&f), "--x0", "1,0,-1,0.5", "--T", "0.5", "--dt", "0.01",
        "--output", s(&csv), "--report", s(&rep),
    ]);
    assert_eq!(code(&out), EXIT_OK, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t,x1,x2,x3,x4,u1,u2,y1,y2,H\n"));
    assert_eq!(text.lines().count(), 52);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(report["dissipation_inequality"], serde_json::Value::Bool(true));
}

#[test]
fn certify_rejects_zero_feedback_on_marginal_system() {
    let dir = tempfile::tempdir().unwrap();
    let sys = scalar(dir.path(), "sys.json", 0.0, 0.0);
    let f = dir.path().join("f.json");
    fs::write(&f, r#"{"m":1,"n":1,"F":[[0.0]]}"#).unwrap();
    assert_eq!(code(&phfb(&["certify", "--input", s(&sys), "--feedback", s(&f)])), EXIT_FAILED);
    fs::write(&f, r#"{"m":1,"n":1,"F":[[-1.0]]}"#).unwrap();
    assert_eq!(code(&phfb(&["certify", "--input", s(&sys), "--feedback", s(&f)])), EXIT_OK);
}
