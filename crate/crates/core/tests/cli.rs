use std::process::{Command, Output};

fn braidkex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_braidkex")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn nf_prints_delta_for_half_twist() {
    let out = braidkex(&["nf", "--n", "3", "1 2 1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "delta_power=1\nfactor_count=0\n");
}

#[test]
fn nf_accepts_empty_word() {
    let out = braidkex(&["nf", "--n", "3", ""]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "delta_power=0\nfactor_count=0\n");
}

#[test]
fn nf_lists_factors_of_inverse_generator() {
    let out = braidkex(&["nf", "--n", "3", "-1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("delta_power=-1\nfactor_count=1\n"), "{text}");
}

#[test]
fn nf_rejects_out_of_range_generator() {
    let out = braidkex(&["nf", "--n", "3", "7"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn handshake_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.bkex"), dir.path().join("b.bkex"));
    for path in [&a, &b] {
        let out = braidkex(&["handshake", "--n", "8", "--l", "32", "--seed", "11", "--transcript", path.to_str().unwrap()]);
        assert!(out.status.success());
        let text = stdout(&out);
        assert!(text.ends_with("MATCH\n"), "{text}");
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn handshake_fails_on_unwritable_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("t.bkex");
    let out = braidkex(&["handshake", "--n", "4", "--l", "4", "--transcript", path.to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn brute_attack_breaks_toy_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("toy.bkex");
    let p = path.to_str().unwrap();
    let out = braidkex(&["handshake", "--n", "4", "--l", "1", "--budget", "1", "--seed", "3", "--transcript", p]);
    assert!(out.status.success());
    let out = braidkex(&["attack", "brute", "--transcript", p, "--depth-left", "3", "--depth-right", "1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("result=success"));
}

#[test]
fn attack_rejects_truncated_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.bkex");
    let p = path.to_str().unwrap();
    assert!(braidkex(&["handshake", "--n", "4", "--l", "4", "--transcript", p]).status.success());
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
    let out = braidkex(&["attack", "length", "--transcript", p]);
    assert!(!out.status.success());
}

#[test]
fn distinguish_reports_full_acceptance_and_repeats() {
    let args = ["distinguish", "--n", "6", "--l", "8", "--trials", "10", "--seed", "4"];
    let (first, second) = (braidkex(&args), braidkex(&args));
    assert!(first.status.success());
    assert!(stdout(&first).contains("acceptance=1.000000\n"));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn distinguish_single_trial() {
    let out = braidkex(&["distinguish", "--n", "6", "--l", "8", "--trials", "1", "--seed", "1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("trials=1\n"));
}
