//! End-to-end tests of the `cyclo-scan` binary: argument handling, output
//! formats, exit codes, and the documented environment override.

use std::process::{Command, Output};

fn cyclo_scan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclo-scan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn scan_json_finds_37_below_100() {
    let out = cyclo_scan(&["scan", "--from", "5", "--to", "100"]);
    assert_eq!(exit_code(&out), 0);
    let v = stdout_json(&out);
    let qualifying: Vec<u64> = v["primes"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["qualifies"] == true)
        .map(|e| e["p"].as_u64().unwrap())
        .collect();
    assert_eq!(qualifying, vec![37]);
    assert_eq!(v["summary"]["qualifying"], 1);
    assert_eq!(v["summary"]["irregular"], 3);
}

#[test]
fn csv_golden_rows() {
    let out = cyclo_scan(&["scan", "--from", "5", "--to", "40", "--format", "csv"]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,residue_mod_4,irregular_pairs,indices,vandiver,qualifies");
    assert!(lines.contains(&"37,1,32,5,assumed,true"), "got:\n{text}");
    assert!(lines.contains(&"13,1,,,assumed,false"), "got:\n{text}");
}

#[test]
fn thread_count_never_changes_output_bytes() {
    let one = cyclo_scan(&["scan", "--from", "5", "--to", "200", "--threads", "1"]);
    let eight = cyclo_scan(&["scan", "--from", "5", "--to", "200", "--threads", "8"]);
    assert_eq!(exit_code(&one), 0);
    assert_eq!(exit_code(&eight), 0);
    assert_eq!(one.stdout, eight.stdout);
}

#[test]
fn all_methods_agree_in_csv() {
    // CSV carries no config echo, so the three methods must emit identical bytes
    let series = cyclo_scan(&["scan", "--from", "5", "--to", "60", "--format", "csv"]);
    for method in ["oracle", "fast"] {
        let other = cyclo_scan(&[
            "scan", "--from", "5", "--to", "60", "--format", "csv", "--bernoulli", method,
        ]);
        assert_eq!(exit_code(&other), 0, "method {method}");
        assert_eq!(series.stdout, other.stdout, "method {method}");
    }
}

#[test]
fn qualifying_only_restricts_body() {
    let out = cyclo_scan(&["scan", "--from", "5", "--to", "100", "--qualifying-only"]);
    let v = stdout_json(&out);
    let primes = v["primes"].as_array().unwrap();
    assert_eq!(primes.len(), 1);
    assert_eq!(primes[0]["p"], 37);
    // the summary still reflects the whole range
    assert_eq!(v["summary"]["primes_scanned"], 23);
}

#[test]
fn dump_bernoulli_writes_tables() {
    let path = std::env::temp_dir().join(format!("cyclo-dump-{}.csv", std::process::id()));
    let out = cyclo_scan(&[
        "scan",
        "--from",
        "5",
        "--to",
        "10",
        "--dump-bernoulli",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let dump = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(dump, "5,2,1\n7,2,6\n7,4,3\n");
}

#[test]
fn strict_vandiver_records_per_prime_errors() {
    let out = cyclo_scan(&[
        "scan", "--from", "5", "--to", "40", "--vandiver", "strict", "--vandiver-bound", "30",
    ]);
    // per-prime failures never abort the scan
    assert_eq!(exit_code(&out), 0);
    let v = stdout_json(&out);
    let p37 = v["primes"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["p"] == 37)
        .unwrap();
    assert!(p37["error"].is_string());
    assert_eq!(p37["qualifies"], false);
    let p29 = v["primes"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["p"] == 29)
        .unwrap();
    assert!(p29["error"].is_null());
}

#[test]
fn config_errors_exit_1() {
    for args in [
        &["scan", "--from", "3", "--to", "10"][..],
        &["scan", "--from", "50", "--to", "10"][..],
        &["scan", "--from", "5", "--to", "10", "--threads", "0"][..],
        &["scan", "--unknown-flag"][..],
        &["verify-balanced", "--p", "8", "--i", "3"][..],
        &["verify-balanced", "--p", "7", "--i", "0"][..],
        &["verify-lemma34", "--p", "11"][..],
        &["verify-lemma34", "--p", "5", "--trials", "0"][..],
    ] {
        let out = cyclo_scan(args);
        assert_eq!(exit_code(&out), 1, "args: {args:?}");
    }
}

#[test]
fn verify_balanced_exit_codes_and_ledger() {
    let out = cyclo_scan(&["verify-balanced", "--p", "37", "--i", "5"]);
    assert_eq!(exit_code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["balanced"], true);
    assert_eq!(v["tangent_dim"], 2);
    assert_eq!(v["dims"].as_array().unwrap().len(), 4);
    assert_eq!(v["dims"][1]["character"], "trivial");
    assert_eq!(v["dims"][1]["h1"], 2);

    // even index: runs, passes, flagged
    let out = cyclo_scan(&["verify-balanced", "--p", "37", "--i", "4"]);
    assert_eq!(exit_code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["i_odd"], false);
    assert_eq!(v["pass"], true);

    // degenerate exponent: ledger still printed, nonzero exit
    let out = cyclo_scan(&["verify-balanced", "--p", "7", "--i", "6"]);
    assert_eq!(exit_code(&out), 2);
    let v = stdout_json(&out);
    assert_eq!(v["degenerate_exponent"], true);
    assert_eq!(v["ad0_h0"], 3);
    assert_eq!(v["pass"], false);
}

#[test]
fn verify_lemma34_runs_and_respects_budget_env() {
    let out = cyclo_scan(&["verify-lemma34", "--p", "5", "--trials", "2", "--seed", "0"]);
    assert_eq!(exit_code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["results"].as_array().unwrap().len(), 2);

    // identical seed, identical bytes
    let again = cyclo_scan(&["verify-lemma34", "--p", "5", "--trials", "2", "--seed", "0"]);
    assert_eq!(out.stdout, again.stdout);

    // a tiny budget is a configuration error
    let out = Command::new(env!("CARGO_BIN_EXE_cyclo-scan"))
        .args(["verify-lemma34", "--p", "5", "--trials", "1"])
        .env("CYCLO_SCAN_ELEMENT_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 1);

    // and so is a malformed one
    let out = Command::new(env!("CARGO_BIN_EXE_cyclo-scan"))
        .args(["verify-lemma34", "--p", "5", "--trials", "1"])
        .env("CYCLO_SCAN_ELEMENT_BUDGET", "plenty")
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn report_validates_against_shipped_schema() {
    let schema_path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../docs/scan-report.schema.json"
    );
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(schema_path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();

    for args in [
        &["scan", "--from", "5", "--to", "200"][..],
        &["scan", "--from", "5", "--to", "100", "--qualifying-only", "--bernoulli", "oracle"][..],
        &["scan", "--from", "5", "--to", "40", "--vandiver", "strict", "--vandiver-bound", "30"][..],
    ] {
        let out = cyclo_scan(args);
        let v = stdout_json(&out);
        let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "schema violations for {args:?}: {errors:?}");
    }
}
