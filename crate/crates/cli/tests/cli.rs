//! End-to-end checks of the binary: exit codes, fixture expectations, and
//! CSV determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_listmix"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    let mut cmd = bin();
    cmd.args(args);
    cmd.output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn count_on_bundled_c4_prints_18() {
    let out = run(&["count", "--graph", fixture("c4.txt").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "18");
}

#[test]
fn count_respects_pins() {
    let out = run(&[
        "count",
        "--graph",
        fixture("c4.txt").to_str().unwrap(),
        "--pin",
        "0=1",
        "--pin",
        "2=1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    // both neighbors of the pinned pair choose from {2,3}
    assert_eq!(stdout(&out).trim(), "4");
}

#[test]
fn check_exit_codes_follow_verdict() {
    let sat = run(&[
        "check",
        "--graph",
        fixture("star15.txt").to_str().unwrap(),
        "--alpha",
        "2",
        "--beta",
        "10",
    ]);
    assert_eq!(sat.status.code(), Some(0));
    assert!(stdout(&sat).contains("satisfied"));

    let unsat = run(&[
        "check",
        "--graph",
        fixture("c4.txt").to_str().unwrap(),
        "--alpha",
        "2",
        "--beta",
        "10",
    ]);
    assert_eq!(unsat.status.code(), Some(1));
    assert!(stdout(&unsat).contains("list size 3"));
}

#[test]
fn usage_and_format_errors_exit_2() {
    let bad_flag = run(&["count", "--graph"]);
    assert_eq!(bad_flag.status.code(), Some(2));

    let missing = run(&["count", "--graph", "/nonexistent/graph.txt"]);
    assert_eq!(missing.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "n 2\ne 0 0\nl 0 1\nl 1 1\n").unwrap();
    let parse = run(&["count", "--graph", bad.to_str().unwrap()]);
    assert_eq!(parse.status.code(), Some(2));
}

#[test]
fn marginal_matches_known_conditioned_value() {
    let out = run(&[
        "marginal",
        "--graph",
        fixture("c4.txt").to_str().unwrap(),
        "--vertex",
        "0",
        "--color",
        "1",
        "--pin",
        "2=1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let line = stdout(&out);
    let value: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
    assert!((value - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn wsm_csv_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("path.txt");
    let gen = run(&[
        "gen",
        "--family",
        "path",
        "--n",
        "9",
        "--q",
        "15",
        "--alpha",
        "2",
        "--beta",
        "10",
        "--seed",
        "5",
        "--out",
        graph.to_str().unwrap(),
    ]);
    assert_eq!(gen.status.code(), Some(0));

    let csv = |name: &str| -> Vec<u8> {
        let path = dir.path().join(name);
        let out = run(&[
            "wsm",
            "--graph",
            graph.to_str().unwrap(),
            "--vertex",
            "4",
            "--radius",
            "3",
            "--alpha",
            "2",
            "--beta",
            "10",
            "--samples",
            "7",
            "--seed",
            "7",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    let a = csv("a.csv");
    let b = csv("b.csv");
    assert_eq!(a, b);
    assert!(String::from_utf8(a)
        .unwrap()
        .starts_with("distance,epsilon_observed,epsilon_envelope,instance_id,seed\n"));
}

#[test]
fn gen_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("one.txt");
    let second = dir.path().join("two.txt");
    for path in [&first, &second] {
        let out = run(&[
            "gen",
            "--family",
            "random",
            "--n",
            "12",
            "--q",
            "6",
            "--list-size",
            "4",
            "--seed",
            "7",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());

    let text = std::fs::read_to_string(&first).unwrap();
    let parsed = listmix::parse_graph(&text).unwrap();
    assert!(parsed.is_triangle_free());
    assert_eq!(listmix::write_graph(&parsed), text);
}

#[test]
fn verifier_commands_pass_on_assumption_instance() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("path.txt");
    run(&[
        "gen", "--family", "path", "--n", "8", "--q", "15", "--alpha", "2", "--beta", "10",
        "--seed", "3", "--out", graph.to_str().unwrap(),
    ]);
    let g = graph.to_str().unwrap();

    let bounds = run(&[
        "bounds", "--graph", g, "--vertex", "4", "--alpha", "2", "--beta", "10", "--samples",
        "4", "--seed", "2",
    ]);
    assert_eq!(bounds.status.code(), Some(0), "{}", stdout(&bounds));

    let contract = run(&[
        "contract", "--graph", g, "--vertex", "3", "--alpha", "2", "--beta", "10", "--samples",
        "3", "--seed", "2",
    ]);
    assert_eq!(contract.status.code(), Some(0), "{}", stdout(&contract));

    let tv = run(&[
        "tvscale", "--graph", g, "--psi", "2,3,4,5", "--lambda", "3,4", "--samples", "3",
        "--seed", "2",
    ]);
    assert_eq!(tv.status.code(), Some(0), "{}", stdout(&tv));

    let corollary = run(&[
        "corollary", "--graph", g, "--psi", "2,3,4,5", "--lambda", "3", "--boundary-vertex",
        "6", "--j1", "1", "--j2", "2", "--samples", "3", "--seed", "2",
    ]);
    assert_eq!(corollary.status.code(), Some(0), "{}", stdout(&corollary));
}

#[test]
fn ssm_strip_check_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("path.txt");
    run(&[
        "gen", "--family", "path", "--n", "8", "--q", "15", "--alpha", "2", "--beta", "10",
        "--seed", "9", "--out", graph.to_str().unwrap(),
    ]);
    let out = run(&[
        "ssm",
        "--graph",
        graph.to_str().unwrap(),
        "--vertex",
        "2",
        "--radius",
        "2",
        "--w",
        "5",
        "--alpha",
        "2",
        "--beta",
        "10",
        "--samples",
        "4",
        "--seed",
        "11",
        "--strip-check",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().count() >= 5);
}
