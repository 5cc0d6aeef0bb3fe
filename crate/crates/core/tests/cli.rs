use std::fs;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_majority-lab"))
        .args(args)
        .env_remove("MAJORITY_LAB_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn simulate_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("results.csv");
    let o = lab(&[
        "simulate", "--n", "512", "--class", "balanced", "--algorithm", "greedy", "--trials", "500", "--seed", "42",
        "--epsilon", "0.05", "--d", "3", "--r", "2", "--r", "8", "--out", path.to_str().unwrap(), "--format", "csv",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,A,B,algorithm,trials,seed,mean,var,min,p50,p90,p99,max");
    assert!(lines[1].starts_with("512,256,256,greedy,500,42,"));
    assert_eq!(lines[2], "threshold,empirical,cap,pass");
    assert_eq!(lines.len(), 5);
    assert!(text.ends_with('\n'));
}

#[test]
fn seed_comes_from_environment() {
    let run = |seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_majority-lab"));
        cmd.args(["simulate", "--n", "64", "--class", "uniform", "--trials", "50"]);
        match seed {
            Some(s) => cmd.env("MAJORITY_LAB_SEED", s),
            None => cmd.env_remove("MAJORITY_LAB_SEED"),
        };
        stdout(&cmd.output().unwrap())
    };
    let from_env = run(Some("99"));
    assert!(from_env.lines().nth(1).unwrap().starts_with("64,,,greedy,50,99,"));
    assert_eq!(from_env, run(Some("99")));
    assert!(run(None).lines().nth(1).unwrap().contains(",50,0,"));
}

#[test]
fn optimal_reports_certificate() {
    let o = lab(&["optimal", "--n", "4", "--family", "parity"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["depth"], 4);
    assert_eq!(v["matched_formula"], true);
    assert!(!lab(&["optimal", "--n", "9", "--family", "xor"]).status.success());
}

#[test]
fn bounds_table() {
    let o = lab(&["bounds", "--n-max", "8"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 9);
    assert!(out.lines().nth(6).unwrap().starts_with("6,2,5,2.697059968,2/7,"));
}

#[test]
fn verify_and_quantum_succeed() {
    let o = lab(&["verify", "--suite", "lowerbounds"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 failed"));
    let o = lab(&["verify", "--suite", "appendix"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("[FINDING] appendix/E[c] = AB/(N-1) N=3"));
    assert!(lab(&["quantum", "--max-n", "6"]).status.success());
}

#[test]
fn bad_arguments_fail() {
    assert!(!lab(&["simulate", "--n", "8", "--class", "fixed"]).status.success());
    assert!(!lab(&["simulate", "--n", "8", "--class", "fixed", "--ones", "9"]).status.success());
    assert!(!lab(&["simulate", "--n", "8", "--epsilon", "1.5"]).status.success());
    assert!(!lab(&["simulate", "--n", "8", "--r", "0.5"]).status.success());
}
