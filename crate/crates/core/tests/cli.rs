use std::process::{Command, Output};

use seqnet::{WitnessResult, SCHEMA};

fn seqnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqnet"))
        .args(args)
        .env("SEQNET_THREADS", "2")
        .output()
        .expect("run seqnet")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const EX46: [&str; 12] = [
    "witness", "-m", "6", "-n", "5", "--rates", "2,1,6,7,1", "--rn2", "5", "--eps", "0.006", "--max-rounds",
];

#[test]
fn witness_for_published_rates_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    let mut args = EX46.to_vec();
    args.extend(["1", "-o", path.to_str().unwrap()]);
    let out = seqnet(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("stable: {x1, x3}"));

    let w = WitnessResult::load(&path).unwrap();
    assert_eq!(w.schema, SCHEMA);
    assert_eq!(w.stable, vec![1, 3]);
    seqnet::verify_witness(&w).unwrap();

    let out = seqnet(&["analyze", "-m", "6", "-n", "5", "--witness", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema"], SCHEMA);
}

#[test]
fn witness_json_output_parses() {
    let mut args = EX46.to_vec();
    args.extend(["1", "--format", "json"]);
    let out = seqnet(&args);
    assert_eq!(out.status.code(), Some(0));
    let w = WitnessResult::from_json(&stdout(&out)).unwrap();
    assert!(w.bistable);
    assert_eq!(w.eps, seqnet::scalar::rat(3, 500));
}

#[test]
fn even_species_count_is_a_usage_error() {
    let out = seqnet(&["witness", "-m", "2", "-n", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(seqnet(&["gen", "-m", "2", "-n", "3", "--bogus"]).status.code(), Some(2));
    assert_eq!(seqnet(&[]).status.code(), Some(2));
}

#[test]
fn gen_prints_the_open_network() {
    let out = seqnet(&["gen", "-m", "2", "-n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("X1 + X2 -> 0 ; r1"));
    assert!(text.contains("X1 -> 2 X3 ; r3"));
    assert_eq!(text.lines().count(), 9);

    let out = seqnet(&["gen", "-m", "6", "-n", "5", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["reactions"].as_array().unwrap().len(), 15);
}

#[test]
fn region_check_reports_violation_with_exit_one() {
    let out = seqnet(&["region-check", "-m", "6", "-n", "5", "--rates", "1,1,1,1,1", "--rn2", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("violated"));
    let out = seqnet(&["region-check", "-m", "6", "-n", "5", "--rates", "2,1,6,7,1", "--rn2", "5"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn simulate_writes_csv_and_rejects_negative_start() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let base = ["simulate", "-m", "6", "-n", "5", "--rates", "2,1,6,7,1", "--rn2", "5", "--eps", "0.006"];
    let mut args = base.to_vec();
    args.extend(["--x0", "1.01,0.99,1,1,1", "--method", "rosenbrock", "-o", csv.to_str().unwrap()]);
    let out = seqnet(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("t,x1,x2,x3,x4,x5"));

    let mut args = base.to_vec();
    args.extend(["--x0", "-1,1,1,1,1"]);
    assert_eq!(seqnet(&args).status.code(), Some(2));
}

#[test]
fn sweep_json_counts_cells() {
    let out = seqnet(&["sweep", "-m", "2..3", "-n", "3,5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema"], SCHEMA);
    assert_eq!(v["cells"].as_array().unwrap().len(), 4);
    assert_eq!(v["bistable"], 4);
}
