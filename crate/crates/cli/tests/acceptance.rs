//! Acceptance suite. Each test checks one release criterion end to end and
//! prints a `ACCEPTANCE <n> (<name>): PASS` line (visible with
//! `cargo test -p cyclo-scan --test acceptance -- --nocapture`).

use std::collections::BTreeSet;
use std::process::Command;
use std::sync::LazyLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use cyclo_core::bernoulli::{bernoulli_mod_p, BernoulliMethod};
use cyclo_core::cohomology::{ad0_h0, balanced_check, local_h_dims, tangent_dim, CharPower};
use cyclo_core::eigenspace::{all_conditions_hold, hr_conditions};
use cyclo_core::primality::primes_in_range;
use cyclo_core::scan::{scan, ScanConfig, ScanReport};
use cyclo_core::sl2::{
    closure, group_order, level_lift_check, pcs_elements, pcs_level2_generators,
    sl2_standard_generators, DEFAULT_ELEMENT_BUDGET,
};

/// The full-horizon scan (5..=3500), single-threaded with the quadratic
/// series method, shared by criteria 2-4.
static HORIZON: LazyLock<(ScanReport, Duration)> = LazyLock::new(|| {
    let config = ScanConfig {
        from: 5,
        to: 3500,
        threads: 1,
        method: BernoulliMethod::SeriesInversion,
        ..ScanConfig::default()
    };
    let start = Instant::now();
    let output = scan(&config).expect("horizon scan");
    (output.report, start.elapsed())
});

fn indices_of(report: &ScanReport, p: u64) -> BTreeSet<u64> {
    report
        .primes
        .iter()
        .find(|e| e.p == p)
        .unwrap_or_else(|| panic!("{p} missing from report"))
        .admissible_indices
        .iter()
        .map(|a| a.i)
        .collect()
}

#[test]
fn acceptance_1_bernoulli_oracle_equivalence() {
    let start = Instant::now();
    for p in primes_in_range(5, 499) {
        let oracle = bernoulli_mod_p(p, BernoulliMethod::Recurrence).unwrap();
        let series = bernoulli_mod_p(p, BernoulliMethod::SeriesInversion).unwrap();
        let fast = bernoulli_mod_p(p, BernoulliMethod::FastSeriesInversion).unwrap();
        let oracle_values: Vec<(u64, u64)> = oracle.iter().collect();
        assert_eq!(oracle_values, series.iter().collect::<Vec<_>>(), "series mismatch at p = {p}");
        assert_eq!(oracle_values, fast.iter().collect::<Vec<_>>(), "fast mismatch at p = {p}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}, budget 30s");
    println!("ACCEPTANCE 1 (Bernoulli oracle equivalence, p <= 499): PASS ({elapsed:?})");
}

#[test]
fn acceptance_2_scan_reproduction_at_horizon() {
    let (report, elapsed) = &*HORIZON;
    assert!(
        *elapsed < Duration::from_secs(600),
        "single-threaded horizon scan took {elapsed:?}, budget 600s"
    );
    let qualifying: BTreeSet<u64> =
        report.primes.iter().filter(|e| e.qualifies).map(|e| e.p).collect();
    assert!(qualifying.contains(&37));
    assert!(qualifying.contains(&101));
    assert!(qualifying.contains(&157));
    assert_eq!(indices_of(report, 37), BTreeSet::from([5]));
    assert_eq!(indices_of(report, 101), BTreeSet::from([33]));
    assert_eq!(indices_of(report, 157), BTreeSet::from([47, 95]));
    // irregular but 3 mod 4
    assert!(!qualifying.contains(&59));
    assert!(!qualifying.contains(&67));
    println!(
        "ACCEPTANCE 2 (scan 5..3500 reproduction, {} qualifying): PASS ({elapsed:?})",
        qualifying.len()
    );
}

#[test]
fn acceptance_3_index_invariants_over_full_range() {
    let (report, _) = &*HORIZON;
    let mut violations = 0usize;
    let mut checked = 0usize;
    for entry in &report.primes {
        let p = entry.p;
        if p % 4 == 1 {
            // the (p-1)/2 filter can only fire for p = 3 mod 4
            if entry.admissible_indices.len() != entry.irregular_pairs.len() {
                violations += 1;
            }
        }
        for a in &entry.admissible_indices {
            checked += 1;
            let i = a.i;
            let ok = i % 2 == 1
                && i >= 3
                && i <= p - 4
                && i != 1
                && i != p - 2
                && i != (p - 1) / 2
                && all_conditions_hold(&hr_conditions(p, i).unwrap());
            if !ok {
                violations += 1;
            }
        }
    }
    assert_eq!(violations, 0, "index invariant violations in 5..3500");
    assert!(checked > 0);
    println!("ACCEPTANCE 3 (index invariants, {checked} indices, 0 violations): PASS");
}

#[test]
fn acceptance_4_cohomology_identities() {
    let primes = primes_in_range(5, 20_000);
    let mut rng = ChaCha12Rng::seed_from_u64(0xC0FFEE);
    for _ in 0..10_000 {
        let p = primes[rng.random_range(0..primes.len())];
        let c = CharPower::new(p, rng.random::<u64>()).unwrap();
        let d = local_h_dims(c);
        assert_eq!(d.h1 - d.h0 - d.h2, 1, "Euler characteristic at (p, j) = ({p}, {})", c.exponent());
        let complement = CharPower::new(p, 1 + (p - 1) - c.exponent()).unwrap();
        assert_eq!(d.h2, local_h_dims(complement).h0, "duality at (p, j) = ({p}, {})", c.exponent());
    }

    let (report, _) = &*HORIZON;
    let mut emitted = 0usize;
    for entry in &report.primes {
        for a in &entry.admissible_indices {
            emitted += 1;
            assert!(balanced_check(entry.p, a.i).unwrap(), "(p, i) = ({}, {})", entry.p, a.i);
            assert_eq!(tangent_dim(entry.p, a.i).unwrap(), 2);
            assert_eq!(ad0_h0(entry.p, a.i).unwrap() + 1, 2);
        }
    }
    assert!(emitted > 0);
    println!("ACCEPTANCE 4 (cohomology identities, 10000 random pairs + {emitted} scanner indices): PASS");
}

#[test]
fn acceptance_5_group_orders() {
    for p in [5u64, 7] {
        let full = closure(&sl2_standard_generators(p, 1).unwrap(), DEFAULT_ELEMENT_BUDGET).unwrap();
        assert_eq!(full.order() as u64, p * (p * p - 1));
        assert_eq!(full.order() as u64, group_order(p, 1).unwrap());

        let pcs_generated =
            closure(&pcs_level2_generators(p).unwrap(), DEFAULT_ELEMENT_BUDGET).unwrap();
        assert_eq!(pcs_generated.order() as u64, p.pow(3));
        let pcs_enumerated = pcs_elements(p, 1, 2, DEFAULT_ELEMENT_BUDGET).unwrap();
        assert!(pcs_generated.set_eq(&pcs_enumerated));
    }
    println!("ACCEPTANCE 5 (SL2 and congruence subgroup orders for p = 5, 7): PASS");
}

#[test]
fn acceptance_6_congruence_lift_trials() {
    let start = Instant::now();
    for p in [5u64, 7] {
        // library route
        let verdict = level_lift_check(p, 10, 0, DEFAULT_ELEMENT_BUDGET).unwrap();
        assert!(verdict.all_pass, "p = {p}");
        assert_eq!(verdict.results.len(), 10);

        // CLI route, as scripted
        let out = Command::new(env!("CARGO_BIN_EXE_cyclo-scan"))
            .args(["verify-lemma34", "--p", &p.to_string(), "--trials", "10", "--seed", "0"])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "p = {p}");
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["all_pass"], true);
        assert_eq!(v["results"].as_array().unwrap().len(), 10);
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:?}, budget 300s");
    println!("ACCEPTANCE 6 (level 2->3 congruence lift, 10 trials at p = 5 and 7): PASS ({elapsed:?})");
}

#[test]
fn acceptance_7_byte_identical_reports_across_threads() {
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_cyclo-scan"))
            .args(["scan", "--from", "5", "--to", "1000", "--threads", threads])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        out.stdout
    };
    let single = run("1");
    let eight = run("8");
    assert_eq!(single, eight, "thread count changed report bytes");
    println!(
        "ACCEPTANCE 7 (byte-identical JSON, threads 1 vs 8, {} bytes): PASS",
        single.len()
    );
}
