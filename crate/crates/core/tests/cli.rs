use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flatiter")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn verdict(o: &Output) -> serde_json::Value {
    serde_json::from_str(stdout(o).trim()).expect("json verdict")
}

#[test]
fn check_reports_both_verdicts() {
    let o = run(&["check", "tau.(tau*X) + X", "tau*X"]);
    assert_eq!(o.status.code(), Some(0));
    let v = verdict(&o);
    assert_eq!(v["result"], true);
    assert_eq!(v["relation"], "strong");
    assert_eq!(v["mode"], "congruence");

    let o = run(&["check", "tau.X", "X", "--rel", "weak"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(verdict(&o)["detail"].is_string());
    let o = run(&["check", "tau.X", "X", "--rel", "weak", "--mode", "equivalence"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn prove_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("law.cert");
    let cert_arg = cert.to_str().unwrap();
    let o = run(&["prove", "a.(b+tau)*X", "a.b*X", "--rel", "branching", "--out", cert_arg]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(verdict(&o)["artifact"], cert_arg);

    assert_eq!(run(&["verify", cert_arg, "--rel", "branching"]).status.code(), Some(0));
    // FT1 is not available in the strong system
    let o = run(&["verify", cert_arg, "--rel", "strong"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(verdict(&o)["result"], false);
}

#[test]
fn prove_refutes_and_respects_fuel() {
    let o = run(&["prove", "a.X", "b.X"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["prove", "a.(b+tau)*X", "a.b*X", "--rel", "branching", "--fuel", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn terms_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("t.bccs");
    std::fs::write(&f, "a*(a*X)\n").unwrap();
    let arg = format!("@{}", f.display());
    assert_eq!(run(&["check", &arg, "a*X"]).status.code(), Some(0));
    assert_eq!(run(&["check", "@/nonexistent/file", "a*X"]).status.code(), Some(2));
}

#[test]
fn lts_in_aldebaran_format() {
    let o = run(&["lts", "a.b.0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("des (0,2,3)"), "{text}");
    assert!(text.contains("(0,\"a\",1)"));
}

#[test]
fn normalize_and_saturate() {
    let o = run(&["normalize", "(a+tau)*0", "--mode", "branching"]);
    assert_eq!(o.status.code(), Some(0));
    let nf = stdout(&o);
    let o = run(&["check", nf.trim(), "(a+tau)*0", "--rel", "branching"]);
    assert_eq!(o.status.code(), Some(0));

    let o = run(&["saturate", "tau.a.0", "--rel", "delay"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(run(&["saturate", "a.0", "--rel", "strong"]).status.code(), Some(2));
}

#[test]
fn phi_and_expand() {
    let o = run(&["phi", "a.(a+tau)*0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).trim().is_empty());
    let o = run(&["phi", "(a+b)*0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a potential prefix-iteration expression"));

    let o = run(&["expand", "a*0 | b*0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "(a+b)*0");
    assert_eq!(run(&["expand", "X | 0"]).status.code(), Some(2));
}

#[test]
fn parse_errors_exit_with_two() {
    let o = run(&["check", "a.(", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}
