mod common;

use std::process::Command;

use common::*;
use nctorus::certificate::CertificateFile;
use nctorus::cli::{parse_element, run, EXIT_BUDGET, EXIT_OK, EXIT_REJECT, EXIT_USAGE};
use nctorus::states::eval;
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("nctorus").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn binary(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_nctorus")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn scratch(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("nctorus-cli-{}-{name}", std::process::id()))
}

#[test]
fn orbit_output() {
    let (code, out, _) = call(&["orbit", "6", "4"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("rep (0,2)\n"), "{out}");
}

#[test]
fn eval_agrees_with_library() {
    let mut r = rng(21);
    for _ in 0..100 {
        let ctx = context(1.0);
        let s = state(&mut r, 6);
        let text = expression(&mut r, 3);
        let expected = eval(&s, &parse_element(&text, &ctx).unwrap().eval(&ctx).unwrap(), &ctx).unwrap();
        let (code, out, err) = call(&["--json", "eval", "--state", &s.to_json(), &text]);
        assert_eq!(code, EXIT_OK, "{text}: {err}");
        let v: Value = serde_json::from_str(&out).unwrap();
        let (re, im) = (v["value"][0].as_f64().unwrap(), v["value"][1].as_f64().unwrap());
        assert!((re - expected.re).abs() < 1e-12 && (im - expected.im).abs() < 1e-12, "{text}");
    }
}

#[test]
fn refute_then_verify_round_trip() {
    let state = r#"{"orbit_values":{"1":0.5}}"#;
    let path = scratch("cert.json");
    let p = path.to_str().unwrap();
    let (code, out) = binary(&["refute", "--state", state, "-o", p]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("certificate written to"), "{out}");

    let (code, out) = binary(&["verify", "--state", state, "--cert", p]);
    assert_eq!(code, EXIT_OK);
    assert!(out.trim_end().ends_with("ACCEPT"), "{out}");

    let CertificateFile::Full(cert) = CertificateFile::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap() else {
        panic!("expected a full certificate");
    };
    let mut bumped = cert.clone();
    bumped.params.n += 1;
    std::fs::write(&path, bumped.to_json()).unwrap();
    let (code, out) = binary(&["verify", "--state", state, "--cert", p]);
    assert_eq!(code, EXIT_REJECT);
    assert!(out.contains("REJECT (divisibility)"), "{out}");

    let mut zeroed = cert;
    zeroed.witness.iter_mut().for_each(|z| *z = num_complex::Complex64::new(0.0, 0.0));
    std::fs::write(&path, zeroed.to_json()).unwrap();
    let (code, out, _) = call(&["--json", "verify", "--state", state, "--cert", p]);
    assert_eq!(code, EXIT_REJECT);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["accepted"], false);
    assert_eq!(v["failed_clause"], "negativity");
    let _ = std::fs::remove_file(&path);
}

#[test]
fn refute_to_stdout_is_parseable() {
    let (code, out, _) = call(&["refute", "--state", r#"{"orbit_values":{"2":-0.9}}"#]);
    assert_eq!(code, EXIT_OK);
    assert!(matches!(CertificateFile::from_json(&out).unwrap(), CertificateFile::Full(_)));
}

#[test]
fn trace_state_is_consistent() {
    let (code, out, _) = call(&["refute", "--state", r#"{"orbit_values":{}}"#]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("CONSISTENT WITH TRACE"), "{out}");
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["eval", "--state", "{}", "W[1,2"]).0, EXIT_USAGE);
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(call(&["refute", "--state", "/nonexistent/state.json"]).0, EXIT_USAGE);
    assert_eq!(call(&["psd", "[[1,2],[2,1]]"]).0, EXIT_REJECT);
    assert_eq!(call(&["psd", "[[1,0.5],[0.5,1]]"]).0, EXIT_OK);
    let (code, _, err) = call(&["refute", "--state", r#"{"orbit_values":{"1":0.2}}"#, "--budget", "3"]);
    assert_eq!(code, EXIT_BUDGET, "{err}");
}
