use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arithstat"))
        .args(args)
        .env_remove("ARITHSTAT_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn constants_for_p2_n2() {
    let out = run(&["constants", "--n", "2", "--p", "2"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["command"], "constants");
    assert_eq!(v["rows"][0]["alpha"], "6/7");
    assert_eq!(v["rows"][0]["beta"], "1/6");
    assert!(v["timings"].is_null());
    let lo: f64 = v["rows"][1]["value_lo_dec"].as_str().unwrap().parse().unwrap();
    let hi: f64 = v["rows"][1]["value_hi_dec"].as_str().unwrap().parse().unwrap();
    assert!(lo <= 0.7307629694 && 0.7307629694 <= hi);
}

#[test]
fn xsize_csv_has_one_row_per_t() {
    let out = run(&["density-xsize", "--n", "2", "--tmax", "6", "--tol", "1e-6", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 8);
    assert!(lines[0].starts_with("profile,t,cutoff,a_lo,a_hi"));
}

#[test]
fn bad_profile_exits_2() {
    let out = run(&["density-xsize", "--profile", "bogus", "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("profile"));
}

#[test]
fn budget_refusal_exits_3() {
    let out = run(&["enumerate", "--n", "3", "--height", "50", "--max-tuples", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
}

#[test]
fn sampling_requires_seed() {
    let out = run(&["enumerate", "--n", "2", "--height", "5", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["split-sample", "--m", "2", "--p", "3", "--height", "10", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_across_runs_and_threads() {
    let args = ["enumerate", "--n", "2", "--height", "15", "--profiles", "rational,quadratic:-3"];
    let a = run(&args);
    let mut more = args.to_vec();
    more.extend(["--threads", "1"]);
    let b = run(&more);
    assert!(a.status.success() && b.status.success());
    let (mut va, mut vb) = (json(&a), json(&b));
    // Only the echoed thread count may differ.
    va["config"]["global"]["threads"] = serde_json::Value::Null;
    vb["config"]["global"]["threads"] = serde_json::Value::Null;
    assert_eq!(va, vb);
    assert_eq!(run(&args).stdout, a.stdout);

    let mc = ["enumerate", "--n", "3", "--height", "20", "--samples", "2000", "--seed", "7"];
    assert_eq!(run(&mc).stdout, run(&mc).stdout);
}

#[test]
fn class_group_of_minus_23() {
    let v = json(&run(&["quad-class", "--d", "-23"]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r["h"] == 3));
}

#[test]
fn factor_census_matches_closed_form() {
    let out = run(&["factor-census", "--m", "3", "--p", "5"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["warnings"].as_array().unwrap().is_empty());
    for r in v["rows"].as_array().unwrap() {
        assert_eq!(r["squarefree_count"].to_string(), r["squarefree_formula"].as_str().unwrap());
    }
}

#[test]
fn run_log_resumes_to_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("run.jsonl");
    let log = log.to_str().unwrap();
    let args = ["enumerate", "--n", "2", "--height", "12", "--blocks", "8", "--log", log];
    let first = run(&args);
    assert!(first.status.success());
    let lines = std::fs::read_to_string(log).unwrap().lines().count();
    assert_eq!(lines, 8);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(std::fs::read_to_string(log).unwrap().lines().count(), 8);
}

#[test]
fn verify_single_check() {
    let out = run(&["verify", "--only", "1"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("PASS"));
}
