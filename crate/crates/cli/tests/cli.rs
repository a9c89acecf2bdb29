use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn extcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extcat")).args(args).output().unwrap()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = extcat(args);
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn z6() -> String {
    data("z6.txt").display().to_string()
}

#[test]
fn check_valid_file() {
    let (code, out, _) = run(&["check", &z6()]);
    assert_eq!(code, 0);
    assert!(out.contains("z4: 0 -> Z/2 -> Z/4 -> Z/2 -> 0  [U]"), "{out}");
}

#[test]
fn check_empty_file() {
    let (code, out, _) = run(&["check", &data("empty.txt").display().to_string(), "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["command"], "check");
    assert_eq!(v["objects"].as_array().unwrap().len(), 0);
}

#[test]
fn invalid_input_exits_2() {
    let (code, _, err) = run(&["check", &data("bad_scope.txt").display().to_string()]);
    assert_eq!(code, 2);
    assert!(err.contains("scope violation: line 2"), "{err}");
    let (code, _, err) = run(&["check", &data("bad_syntax.txt").display().to_string()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2, column 17"), "{err}");
    let (code, _, _) = run(&["check", "/nonexistent/file"]);
    assert_eq!(code, 2);
}

#[test]
fn decide_exit_codes() {
    assert_eq!(run(&["decide", &z6(), "mixed", "squares"]).0, 0);
    assert_eq!(run(&["decide", &z6(), "one", "other"]).0, 1);
    assert_eq!(run(&["decide", &z6(), "flanks", "single", "--method", "completo-prime"]).0, 0);
    // the flanks are outside the category the partial test works in
    assert_eq!(run(&["decide", &z6(), "flanks", "single", "--method", "parziale"]).0, 2);
    assert_eq!(run(&["decide", &z6(), "one", "missing"]).0, 2);
}

#[test]
fn caps_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_extcat"))
        .args(["decide", &z6(), "mixed", "squares", "--method", "oracle"])
        .env("EXTCAT_ORACLE_MAX_ORDER", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_extcat"))
        .args(["check", &z6()])
        .env("EXTCAT_MAX_GROUP_ORDER", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_is_deterministic() {
    for args in [
        vec!["decide", "Z6", "mixed", "squares"],
        vec!["endoring", "Z6", "s"],
        vec!["invariants", "Z6", "s", "q2"],
        vec!["digraph", "Z6", "cycle"],
    ] {
        let path = z6();
        let mut args: Vec<&str> = args.iter().map(|a| if *a == "Z6" { path.as_str() } else { a }).collect();
        args.extend(["--format", "json"]);
        let a = extcat(&args);
        let b = extcat(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn reports_revalidate() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 5] = [
        &["decide", "mixed", "squares"],
        &["decide", "flanks", "single"],
        &["invariants", "s", "t"],
        &["endoring", "z4"],
        &["digraph", "cycle"],
    ];
    for (k, case) in cases.iter().enumerate() {
        let path = z6();
        let mut args = vec![case[0], path.as_str()];
        args.extend(&case[1..]);
        args.extend(["--format", "json"]);
        let out = extcat(&args);
        let file = dir.path().join(format!("r{k}.json"));
        std::fs::write(&file, &out.stdout).unwrap();
        let (code, text, _) = run(&["revalidate", &path, &file.display().to_string()]);
        assert_eq!(code, 0, "{case:?}: {text}");
    }
}

#[test]
fn tampered_report_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = extcat(&["decide", &z6(), "mixed", "squares", "--method", "completo", "--format", "json"]);
    let mut v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // claim the lower classes pair across
    v["results"][0]["witnesses"]["m,l"] = serde_json::json!([[0, 1], [1, 0]]);
    let file = dir.path().join("bad.json");
    std::fs::write(&file, serde_json::to_string(&v).unwrap()).unwrap();
    let (code, text, _) = run(&["revalidate", &z6(), &file.display().to_string()]);
    assert_eq!(code, 2);
    assert!(text.contains("different classes"), "{text}");
}

#[test]
fn digraph_reports() {
    let (code, out, _) = run(&["digraph", &z6(), "cycle", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["hall_matching"]["holds"], true);
    assert!(v["relabel"]["pairing"].is_array());
    let (_, out, _) = run(&["digraph", &z6(), "stuck"]);
    assert!(out.contains("witness {x1 x2}"), "{out}");
}

#[test]
fn corpus_output_parses_back() {
    let (code, out, _) = run(&["corpus", "--max-order", "24", "--primes", "2,3"]);
    assert_eq!(code, 0);
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("corpus.txt");
    std::fs::write(&file, &out).unwrap();
    let (code, checked, _) = run(&["check", &file.display().to_string()]);
    assert_eq!(code, 0);
    assert_eq!(checked.lines().filter(|l| l.ends_with("[U]")).count(), out.lines().count());
    let a = run(&["corpus", "--max-order", "24", "--sample", "5", "--seed", "9"]).1;
    let b = run(&["corpus", "--max-order", "24", "--sample", "5", "--seed", "9"]).1;
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 5);
    assert!(a.lines().all(|l| out.contains(l)));
    assert_eq!(run(&["corpus", "--primes", "4"]).0, 2);
}
