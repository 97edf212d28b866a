use std::process::{Command, Output};

fn collatz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_collatz"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn documented_outputs() {
    let o = collatz(&["step", "--n", "27"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "kappa=31 k=2 k'=1 apex=62\n");
    assert_eq!(stdout(&collatz(&["hseq", "--l", "2"])), "111000\n");
    assert_eq!(
        stdout(&collatz(&["hseq", "--l", "3"])),
        "111101101000010010\n"
    );
    assert_eq!(
        stdout(&collatz(&["expected-accuracy", "--frontier-step", "3"])),
        "0.5625\n"
    );
    assert_eq!(
        stdout(&collatz(&[
            "expected-accuracy",
            "--frontier-step",
            "4",
            "--exact"
        ])),
        "23/32\n"
    );
    assert_eq!(
        stdout(&collatz(&["suffix", "--k", "2", "--k-prime", "3"])),
        "000011\n"
    );
    assert_eq!(
        stdout(&collatz(&["prob", "--k", "1", "--k-prime", "1"])),
        "1/4 = 0.25\n"
    );
    assert_eq!(
        stdout(&collatz(&["oracle", "--n", "5"])),
        "suffix k=1 k'=3\ndirect k=1 k'=3\n"
    );
}

#[test]
fn step_json() {
    let o = collatz(&["step", "--n", "7", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["kappa"], 13);
    assert_eq!(v["apex"], 26);
}

#[test]
fn validation_errors_exit_1() {
    for args in [
        &["step", "--n", "28"][..],
        &["step", "--n", "0"],
        &["step", "--bogus"],
        &["hseq", "--l", "0"],
        &["expected-accuracy"],
        &["expected-accuracy", "--frontier-limits", "1,2"],
        &[
            "gen",
            "--task",
            "long_step",
            "--base",
            "10",
            "--count",
            "3",
            "--out",
            "/tmp/never",
        ],
        &[
            "gen",
            "--seed",
            "1",
            "--task",
            "long_step",
            "--count",
            "3",
            "--out",
            "/tmp/never",
        ],
        &[
            "gen",
            "--seed",
            "1",
            "--task",
            "nope",
            "--base",
            "10",
            "--count",
            "3",
            "--out",
            "/tmp/never",
        ],
        &[
            "emulate",
            "--frontier-step",
            "2",
            "--count",
            "3",
            "--out",
            "/tmp/never",
        ],
        &["nonsense"],
    ] {
        let o = collatz(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn io_errors_exit_2() {
    let o = collatz(&[
        "gen",
        "--seed",
        "1",
        "--task",
        "apex",
        "--base",
        "10",
        "--count",
        "3",
        "--out",
        "/nonexistent/dir/x",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = collatz(&["analyze", "--in", "/nonexistent/preds.tsv", "--base", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(collatz(&["--help"]).status.code(), Some(0));
    assert_eq!(collatz(&["--version"]).status.code(), Some(0));
}

#[test]
fn emulate_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let preds = dir.path().join("preds.tsv");
    let report = dir.path().join("report.json");
    let csv = dir.path().join("hist.csv");
    let p = preds.to_str().unwrap();
    let o = collatz(&[
        "emulate",
        "--frontier-step",
        "4",
        "--count",
        "5000",
        "--seed",
        "7",
        "--out",
        p,
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let first = std::fs::read(&preds).unwrap();
    collatz(&[
        "emulate",
        "--frontier-step",
        "4",
        "--count",
        "5000",
        "--seed",
        "7",
        "--threads",
        "1",
        "--out",
        p,
    ]);
    assert_eq!(
        std::fs::read(&preds).unwrap(),
        first,
        "emulation depends on thread count"
    );

    let o = collatz(&[
        "analyze",
        "--in",
        p,
        "--base",
        "27",
        "--report",
        report.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("accuracy"));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(v["total"], 5000);
    let accuracy = v["accuracy"].as_f64().unwrap();
    assert!((accuracy - 23.0 / 32.0).abs() < 0.03, "{accuracy}");
    let hist = std::fs::read_to_string(&csv).unwrap();
    assert!(hist.starts_with("bin,ratio_lo,ratio_hi,count,fraction\n"));
}

#[test]
fn analyze_reports_rejected_lines() {
    let dir = tempfile::tempdir().unwrap();
    let preds = dir.path().join("preds.tsv");
    std::fs::write(&preds, "27\t31\t31\n7\t12\t9\n").unwrap();
    let p = preds.to_str().unwrap();
    let o = collatz(&["analyze", "--in", p, "--base", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":2:"));
    let o = collatz(&["analyze", "--in", p, "--base", "10", "--strict"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_small_range() {
    let o = collatz(&["verify", "--max-n", "65536", "--count-bits", "18"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 5);
    assert!(out.lines().all(|l| l.starts_with("PASS")));
}
