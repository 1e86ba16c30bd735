use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_derangements"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn map_and_invert() {
    let o = run(&["map", "--perm", "(1,3)(2,4)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "(1)(2,3,4)\n");

    let o = run(&["invert", "--perm", "(2)(1,3,4)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "(1,2,3,4)\n");
}

#[test]
fn domain_errors_exit_two() {
    for (args, needle) in [
        (vec!["map", "--perm", "(1,2)(3,4)"], "ExcludedInput"),
        (vec!["invert", "--perm", "(1)(2,3)(4,5)"], "ExcludedInput"),
        (
            vec!["invert", "--perm", "(1,2,3)"],
            "NotExactlyOneFixedPoint",
        ),
        (vec!["map", "--perm", "(1,2)(2,3)"], "RepeatedElement"),
        (vec!["verify", "--max-n", "99"], "BoundExceeded"),
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8(o.stderr).unwrap();
        assert!(err.contains(needle), "{args:?}: {err}");
    }
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_and_table_succeed() {
    let o = run(&["verify", "--max-n", "6", "--jobs", "4", "--structured"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["reports"][5]["image_size"], 264);

    let o = run(&["table"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).matches("MATCH").count(), 16);
}

#[test]
fn count_runs_past_machine_words() {
    let o = run(&["count", "--max-n", "30", "--bound", "7", "--structured"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        doc["records"][30]["d_n"],
        "97581073836835777732377428235481"
    );
    assert_eq!(doc["records"][30]["d_n_brute"], serde_json::Value::Null);
}
