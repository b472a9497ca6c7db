//! Exit codes, output routing and formats of the `rigidity` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn rigidity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rigidity")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    rigidity(args).status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn tmp(name: &str, body: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn certified_bundle_exits_zero_with_text_verdict() {
    let o = rigidity(&["certify", "LLRR"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("rigid-rel-cusp"), "{text}");
    assert!(text.contains("(t - 1)^5"), "{text}");
}

#[test]
fn bad_monodromy_names_the_token() {
    let o = rigidity(&["certify", "LXR"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("'X'"), "{}", stderr(&o));
    assert_eq!(code(&["certify", "LLL"]), 2);
    assert_eq!(code(&["holonomy", ""]), 2);
}

#[test]
fn bad_flags_are_input_errors() {
    assert_eq!(code(&["certify", "LLRR", "--reps", "foo"]), 2);
    assert_eq!(code(&["certify", "LLRR", "--tol-root", "-1"]), 2);
    assert_eq!(code(&["certify", "LLRR", "--solution", "9"]), 2);
    assert_eq!(code(&["certify", "LLRR", "--holonomy", "/nonexistent/h.json"]), 2);
}

#[test]
fn bad_files_are_input_errors() {
    let garbage = tmp("garbage.json", "{ not json");
    assert_eq!(code(&["alexander", garbage.to_str().unwrap()]), 2);
    let unknown = tmp("unknown-gen.json", r#"{"generators":["a","b"],"relators":["ac"],"abelianization":[1,1]}"#);
    let o = rigidity(&["alexander", unknown.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains('c'), "{}", stderr(&o));
    let wrong_rep = tmp(
        "wrong-rep.json",
        r#"{"generators":["a","b"],"relators":["a^2b^-3"],"abelianization":[3,2],"representation":[[[[2,0]]],[[[1,0]]]]}"#,
    );
    assert_eq!(code(&["alexander", wrong_rep.to_str().unwrap()]), 2);
    let not_holonomy = tmp(
        "not-holonomy.json",
        r#"{"sl2":[[[[1,0],[0,0]],[[0,0],[1,0]]],[[[1,0],[1,0]],[[0,0],[1,0]]],[[[1,0],[0,0]],[[1,0],[1,0]]]]}"#,
    );
    assert_eq!(code(&["certify", "LLRR", "--holonomy", not_holonomy.to_str().unwrap()]), 2);
}

#[test]
fn numerical_failure_exits_three() {
    assert_eq!(code(&["trace-solve", "LLRR", "--starts", "0"]), 3);
}

#[test]
fn all_inconclusive_exits_four() {
    // A root tolerance this loose swallows the non-trivial factors at t = 1.
    assert_eq!(code(&["certify", "LLRR", "--tol-root", "0.5"]), 4);
}

#[test]
fn output_flag_writes_json_file() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("rrl.json");
    let o = rigidity(&["trace-solve", "RRL", "--format", "json", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["monodromy"], "RRL");
    assert!(!v["solutions"].as_array().unwrap().is_empty());
}

#[test]
fn every_subcommand_renders_text() {
    let trefoil = tmp("trefoil.json", r#"{"generators":["a","b"],"relators":["a^2b^-3"],"abelianization":[3,2]}"#);
    for args in [
        vec!["holonomy", "RRL"],
        vec!["trace-solve", "LLRR"],
        vec!["action", "LLRR", "--direction", "forward", "--reps", "v"],
        vec!["alexander", trefoil.to_str().unwrap(), "--column", "1"],
    ] {
        let o = rigidity(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
        assert!(!o.stdout.is_empty());
    }
}

#[test]
fn holonomy_json_feeds_back_into_certify() {
    let o = rigidity(&["holonomy", "LLRR", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let sol = &v["solutions"][0];
    let file = serde_json::json!({ "so31": [sol["so31"]["a"], sol["so31"]["b"], sol["so31"]["x"]] });
    let path = tmp("llrr-so31.json", &file.to_string());
    assert_eq!(code(&["certify", "LLRR", "--holonomy", path.to_str().unwrap()]), 0);
}
