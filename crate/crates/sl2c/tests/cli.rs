use std::path::PathBuf;
use std::process::{Command, Output};

use sl2c::emit::parse_csv;
use sl2c::experiment::parse_log_csv;
use sl2c::record::CollisionRecord;

fn sl2c(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sl2c")).args(args).output().expect("run sl2c")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sl2c-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn linear_refuses_random_pairs_generic_accepts() {
    let run = sl2c(&["run", "--p", "2", "--N", "8", "--gen", "random", "--alg", "linear"]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("det(A0 - A1)"));

    let att = sl2c(&["attack", "--p", "2", "--n", "8", "--gen", "random", "--alg", "linear", "--seed", "3"]);
    assert_eq!(att.status.code(), Some(2));

    let ok = sl2c(&["attack", "--p", "2", "--n", "8", "--gen", "random", "--alg", "generic_commute", "--seed", "3"]);
    assert_eq!(ok.status.code(), Some(0));
    let rec: CollisionRecord = serde_json::from_str(&stdout(&ok)).unwrap();
    assert!(rec.verify().unwrap());
}

#[test]
fn attack_then_verify() {
    for (p, n, alg) in [("2", "16", "even"), ("65521", "1", "linear"), ("3", "10", "pqtz"), ("2", "12", "generic_compressed")] {
        let gen = if alg.starts_with("generic") { "random" } else { "xi_random" };
        let o = sl2c(&["attack", "--p", p, "--n", n, "--alg", alg, "--gen", gen, "--seed", "5"]);
        assert!(o.status.success(), "{alg}: {}", String::from_utf8_lossy(&o.stderr));
        let path = scratch(&format!("{alg}.json"));
        std::fs::write(&path, o.stdout).unwrap();
        let v = sl2c(&["verify", path.to_str().unwrap()]);
        assert!(v.status.success());
        assert_eq!(stdout(&v).trim(), "verified");

        let mut rec: CollisionRecord = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        rec.w1.push('1');
        std::fs::write(&path, serde_json::to_string(&rec).unwrap()).unwrap();
        assert_eq!(sl2c(&["verify", path.to_str().unwrap()]).status.code(), Some(1));
    }
}

#[test]
fn table6_matches_golden() {
    let o = sl2c(&["table6"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), include_str!("golden/table6.txt"));
}

#[test]
fn preset_appendix_b_f7() {
    let o = sl2c(&["preset", "appendixB", "--p", "7"]);
    assert_eq!(stdout(&o), "[3,6;1,0]\n[4,6;1,0]\n");
}

#[test]
fn runs_are_deterministic() {
    let args = ["run", "--p-min", "8", "--p-max", "16", "--N", "16", "--alg", "linear", "--trials", "40", "--seed", "9"];
    let a = sl2c(&args);
    let b = sl2c(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut other = args.to_vec();
    let last = other.len() - 1;
    other[last] = "10";
    assert_ne!(sl2c(&other).stdout, a.stdout);

    let rows = parse_csv(&stdout(&a)).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].trials, 40);
    assert_eq!(rows[0].failures, 0);
}

#[test]
fn run_writes_log_and_json() {
    let log = scratch("log.csv");
    let o = sl2c(&[
        "run", "--p", "2", "--N", "12", "--alg", "generic_compressed", "--gen", "random", "--trials", "12", "--out", "json", "--log",
        log.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let metrics: Vec<&str> = rows.as_array().unwrap().iter().map(|r| r["metric"].as_str().unwrap()).collect();
    assert_eq!(metrics, ["total", "diag", "tri", "phase2"]);
    let trials = parse_log_csv(&std::fs::read_to_string(&log).unwrap()).unwrap();
    assert_eq!(trials.len(), 12);
    assert!(trials.iter().all(|t| t.verified && t.u0_len.is_some()));
}

#[test]
fn config_file_and_table_output() {
    let cfg = scratch("cfg.json");
    std::fs::write(&cfg, r#"{"p_min": 128, "p_max": 256, "N": 16, "gen": "xi_random", "alg": "oracle", "trials": 3, "seed": 1, "out": "table"}"#).unwrap();
    let o = sl2c(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("[128, 256]") && s.contains(" q "), "{s}");
}

#[test]
fn mixing_exit_status() {
    let three = sl2c(&["mixing", "--q", "3", "--m-max", "20"]);
    assert!(three.status.success());
    assert_eq!(stdout(&three).lines().count(), 22);
    assert_eq!(sl2c(&["mixing", "--q", "2"]).status.code(), Some(1));
    assert_eq!(sl2c(&["mixing", "--q", "7"]).status.code(), Some(2));
}
