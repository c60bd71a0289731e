use std::process::{Command, Output};

use serde_json::Value;

fn ftau(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftau"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("json output")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn golden_scl() {
    let o = ftau(&["scl", "lift(trans(t),0)", "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["kind"], "ztau-half");
    assert_eq!(v["value"], "(0+1*t)/2");
    let o = ftau(&["scl", "lift(trans(t),0)"]);
    assert_eq!(stdout(&o).trim(), "(0+1*t)/2 (exact)");
}

const TORSION: &str = r#"lift(treepair {"p": ["s+", ["s+", "leaf", "leaf"], "leaf"], "q": ["s+", ["s+", "leaf", "leaf"], "leaf"], "shift": 1}, 0)"#;

#[test]
fn torsion_rot() {
    let o = ftau(&["rot", TORSION]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "1/3 (exact, certified)");
    let o = ftau(&["scl", TORSION]);
    assert_eq!(stdout(&o).trim(), "1/6 (exact)");
    let shifted = format!("lift({TORSION}, 2)");
    let o = ftau(&["rot", &shifted, "--json"]);
    assert_eq!(json(&o)["value"], "7/3");
}

#[test]
fn exit_codes() {
    assert_eq!(code(&ftau(&[])), 3);
    assert_eq!(code(&ftau(&["rot"])), 3);
    assert_eq!(code(&ftau(&["rot", "x", "--max-iter", "0"])), 3);
    assert_eq!(code(&ftau(&["--help"])), 0);
    let o = ftau(&["rot", "rot(t) * trans(t)", "--json"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["error"], "TypeError");
    let o = ftau(&["eval", "comm(a,", "--json"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["error"], "SyntaxError");
    let o = ftau(&["factor", "rot(0)"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    assert!(stdout(&o).is_empty());
    // exceeding the piece cap is inconclusive, not wrong
    let pair = r#"treepair {"p": ["s+", "leaf", "leaf"], "q": ["s-", "leaf", "leaf"], "shift": 0}"#;
    let o = ftau(&["eval", &format!("{pair}^40"), "--piece-cap", "2", "--json"]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["error"], "PowerBudgetExceeded");
    let bad = r#"treepair {"p": ["s+", "leaf", "leaf"], "q": "leaf", "shift": 0}"#;
    assert_eq!(code(&ftau(&["eval", bad])), 1);
}

#[test]
fn connect_and_check_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for extra in [&[][..], &["--derived"][..]] {
        let mut args = vec!["connect", "t", "1-t", "--json"];
        args.extend_from_slice(extra);
        let o = ftau(&args);
        assert_eq!(code(&o), 0, "{o:?}");
        let path = dir.path().join("cert.json");
        std::fs::write(&path, stdout(&o)).unwrap();
        let o = ftau(&["check", path.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{o:?}");
        assert!(stdout(&o).starts_with("ok: transitivity certificate verified"));
    }
    let o = ftau(&["connect", "t^2", "t"]);
    assert_eq!(code(&o), 3);
    let o = ftau(&["connect", "1-t,t", "2-3*t,1-t", "--tuple"]);
    assert_eq!(code(&o), 0, "{o:?}");
}

#[test]
fn tampered_certificate_names_the_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let o = ftau(&["connect", "t", "1-t", "--derived", "--json"]);
    let mut doc = json(&o);
    doc["certificate"]["data"]["ys"][0] = serde_json::json!({"a": "2", "b": "-3"});
    std::fs::write(&path, doc.to_string()).unwrap();
    let o = ftau(&["check", path.to_str().unwrap(), "--json"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["error"], "CertificateError");
    assert!(v["message"].as_str().unwrap().contains("x_0 is not sent to y_0"), "{v}");

    let o = ftau(&["trick", "rot(t)", "--json"]);
    let mut doc = json(&o);
    doc["certificate"]["elements"]["k"]["v"] = serde_json::json!({"a": "0", "b": "1"});
    std::fs::write(&path, doc.to_string()).unwrap();
    let o = ftau(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(!String::from_utf8_lossy(&o.stderr).trim().is_empty());

    std::fs::write(&path, "").unwrap();
    let o = ftau(&["check", path.to_str().unwrap(), "--json"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["error"], "SchemaError");
}

#[test]
fn check_accepts_expressions_and_elements() {
    let o = ftau(&["check", "comm(rot(t), nope)"]);
    assert_eq!(code(&o), 1);
    let o = ftau(&["check", "comm(rot(t), rot(1-t))"]);
    assert_eq!(code(&o), 0);
    let o = ftau(&["eval", "rot(t)", "--json"]);
    let text = stdout(&o);
    let o = ftau(&["check", text.trim()]);
    assert_eq!(code(&o), 0, "{o:?}");
    assert_eq!(stdout(&o).trim(), "ok: valid circle map");
}

#[test]
fn constructions_succeed() {
    for args in [
        &["factor", "rot(t)"][..],
        &["factor", TORSION.trim_start_matches("lift(").trim_end_matches(", 0)")][..],
        &["trick", "rot(t)", "--x", "0"][..],
        &["defect", "--n", "3"][..],
    ] {
        let o = ftau(args);
        assert_eq!(code(&o), 0, "{args:?}: {o:?}");
    }
    let o = ftau(&["defect", "--n", "8"]);
    assert_eq!(stdout(&o).trim(), "delta = 1 (exact)");
}

#[test]
fn seeded_commands_are_byte_identical() {
    let runs: Vec<Vec<&str>> = vec![
        vec!["random", "--size", "6", "--flavor", "T_tau", "--seed", "42", "--json"],
        vec!["random", "--size", "5", "--flavor", "lift", "--seed", "7", "--json"],
        vec!["random", "--size", "4", "--flavor", "F_tau", "--seed", "3", "--json"],
        vec!["defect", "--search", "--samples", "40", "--seed", "5", "--json"],
        vec!["trick", "rot(t)", "--seed", "9", "--json"],
        vec!["factor", "rot(1-t)", "--json"],
        vec!["connect", "t", "1-t", "--derived", "--json"],
    ];
    for args in runs {
        let a = ftau(&args);
        let b = ftau(&args);
        assert_eq!(code(&a), 0, "{args:?}: {a:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        let single = Command::new(env!("CARGO_BIN_EXE_ftau"))
            .args(&args)
            .env("FTAU_THREADS", "1")
            .output()
            .unwrap();
        assert_eq!(a.stdout, single.stdout, "{args:?} with one thread");
    }
}

#[test]
fn random_outputs_validate() {
    let o = ftau(&["random", "--size", "5", "--flavor", "T_tau", "--seed", "1", "--json"]);
    let text = stdout(&o);
    let o = ftau(&["check", text.trim()]);
    assert_eq!(code(&o), 0, "{o:?}");
    let o = ftau(&["random", "--flavor", "nonsense"]);
    assert_eq!(code(&o), 3);
}
