//! Range scanning, parallel execution, and deterministic report emission.
//!
//! Primes are handed to worker threads through a dynamic cursor (larger
//! primes cost quadratically more, so static chunking would balance badly)
//! and results are reassembled in ascending order before serialization, so
//! the emitted bytes are independent of thread count and scheduling. The
//! config echo deliberately excludes execution knobs like the thread count
//! for the same reason.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;

use serde::Serialize;
use thiserror::Error;

use crate::bernoulli::{bernoulli_mod_p, BernoulliMethod, IrregularPair};
use crate::cohomology::{
    ad0_h0, balanced_check, local_h_dims, tangent_dim, CharPower, CohomologyError, LocalDims,
};
use crate::eigenspace::{
    report_from_pairs, AdmissibleIndex, PrimeReport, VandiverMode, VandiverPolicy, VandiverStatus,
    CERTIFICATION_NOTE,
};
use crate::primality::primes_in_range;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScanError {
    #[error("invalid scan range [{from}, {to}]: need 5 <= from <= to")]
    InvalidRange { from: u64, to: u64 },
    #[error("thread count must be at least 1")]
    NoThreads,
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Scan configuration. `threads` and the output format shape execution and
/// presentation only; they never influence report contents.
#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub from: u64,
    pub to: u64,
    pub vandiver: VandiverPolicy,
    pub method: BernoulliMethod,
    pub threads: usize,
    pub qualifying_only: bool,
    pub seed: u64,
    /// Collect per-prime Bernoulli tables in dump format (`p,k,B_k` lines);
    /// the CLI writes them to the `--dump-bernoulli` path.
    pub collect_bernoulli_dump: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            from: 5,
            to: 3500,
            vandiver: VandiverPolicy::default(),
            method: BernoulliMethod::default(),
            threads: 1,
            qualifying_only: false,
            seed: 0,
            collect_bernoulli_dump: false,
        }
    }
}

/// The part of the configuration that determines report contents, echoed
/// into the report. Execution-only settings (threads, format, dump paths)
/// are excluded so identical mathematical inputs emit identical bytes.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ConfigEcho {
    pub from: u64,
    pub to: u64,
    pub vandiver_policy: VandiverMode,
    pub vandiver_bound: u64,
    pub bernoulli_method: BernoulliMethod,
    pub qualifying_only: bool,
    pub seed: u64,
}

/// One prime's row in the report. Per-prime failures are recorded in
/// `error` instead of aborting the scan.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct PrimeEntry {
    pub p: u64,
    pub residue_mod_4: u8,
    pub irregular_pairs: Vec<IrregularPair>,
    pub admissible_indices: Vec<AdmissibleIndex>,
    pub det_exponents: Vec<u64>,
    pub vandiver_status: VandiverStatus,
    pub qualifies: bool,
    pub certification_note: &'static str,
    pub error: Option<String>,
}

impl PrimeEntry {
    fn from_report(report: PrimeReport) -> Self {
        PrimeEntry {
            p: report.p,
            residue_mod_4: report.residue_mod_4,
            irregular_pairs: report.irregular_pairs,
            admissible_indices: report.admissible_indices,
            det_exponents: report.det_exponents,
            vandiver_status: report.vandiver_status,
            qualifies: report.qualifies,
            certification_note: CERTIFICATION_NOTE,
            error: None,
        }
    }

    fn from_error(p: u64, message: String) -> Self {
        PrimeEntry {
            p,
            residue_mod_4: (p % 4) as u8,
            irregular_pairs: Vec::new(),
            admissible_indices: Vec::new(),
            det_exponents: Vec::new(),
            vandiver_status: VandiverStatus::NotChecked,
            qualifies: false,
            certification_note: CERTIFICATION_NOTE,
            error: Some(message),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
pub struct ScanSummary {
    pub primes_scanned: u64,
    pub irregular: u64,
    pub qualifying: u64,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ScanReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: ConfigEcho,
    pub primes: Vec<PrimeEntry>,
    pub summary: ScanSummary,
}

/// A scan's full result: the report plus the optional Bernoulli dump.
#[derive(Debug, Clone)]
pub struct ScanOutput {
    pub report: ScanReport,
    pub bernoulli_dump: Option<String>,
}

fn compute_entry(p: u64, config: &ScanConfig) -> (PrimeEntry, Option<String>) {
    let table = match bernoulli_mod_p(p, config.method) {
        Ok(table) => table,
        Err(e) => return (PrimeEntry::from_error(p, e.to_string()), None),
    };
    let dump = config.collect_bernoulli_dump.then(|| table.dump_lines());
    let pairs = table.irregular_pairs();
    match report_from_pairs(p, pairs, &config.vandiver) {
        Ok(report) => (PrimeEntry::from_report(report), dump),
        Err(e) => (PrimeEntry::from_error(p, e.to_string()), dump),
    }
}

fn summarize(entries: &[PrimeEntry]) -> ScanSummary {
    ScanSummary {
        primes_scanned: entries.len() as u64,
        irregular: entries.iter().filter(|e| !e.irregular_pairs.is_empty()).count() as u64,
        qualifying: entries.iter().filter(|e| e.qualifies).count() as u64,
    }
}

/// Scans every prime in the configured range. Workers pull primes from a
/// shared cursor; the aggregation step restores ascending order, so the
/// report is identical for any thread count.
pub fn scan(config: &ScanConfig) -> Result<ScanOutput, ScanError> {
    if config.from < 5 || config.from > config.to {
        return Err(ScanError::InvalidRange { from: config.from, to: config.to });
    }
    if config.threads < 1 {
        return Err(ScanError::NoThreads);
    }
    let primes = primes_in_range(config.from, config.to);

    let mut slots: Vec<Option<(PrimeEntry, Option<String>)>> = vec![None; primes.len()];
    if config.threads == 1 {
        for (i, &p) in primes.iter().enumerate() {
            slots[i] = Some(compute_entry(p, config));
        }
    } else {
        let cursor = AtomicUsize::new(0);
        let (tx, rx) = mpsc::channel();
        thread::scope(|scope| {
            for _ in 0..config.threads {
                let tx = tx.clone();
                let cursor = &cursor;
                let primes = &primes;
                scope.spawn(move || loop {
                    let i = cursor.fetch_add(1, Ordering::Relaxed);
                    if i >= primes.len() {
                        break;
                    }
                    if tx.send((i, compute_entry(primes[i], config))).is_err() {
                        break;
                    }
                });
            }
        });
        drop(tx);
        for (i, result) in rx {
            slots[i] = Some(result);
        }
    }

    let mut entries = Vec::with_capacity(primes.len());
    let mut dump = config.collect_bernoulli_dump.then(String::new);
    for (i, slot) in slots.into_iter().enumerate() {
        let (entry, chunk) = slot.ok_or_else(|| {
            ScanError::Inconsistency(format!("no result for prime {}", primes[i]))
        })?;
        if entry.p != primes[i] {
            return Err(ScanError::Inconsistency(format!(
                "entry for {} landed in slot for {}",
                entry.p, primes[i]
            )));
        }
        if let (Some(dump), Some(chunk)) = (dump.as_mut(), chunk) {
            dump.push_str(&chunk);
        }
        entries.push(entry);
    }

    let summary = summarize(&entries);
    if !entries.windows(2).all(|w| w[0].p < w[1].p) {
        return Err(ScanError::Inconsistency("entries not strictly ascending".into()));
    }
    if config.qualifying_only {
        entries.retain(|e| e.qualifies);
    }
    let report = ScanReport {
        tool: "cyclo-scan",
        version: env!("CARGO_PKG_VERSION"),
        config: ConfigEcho {
            from: config.from,
            to: config.to,
            vandiver_policy: config.vandiver.mode,
            vandiver_bound: config.vandiver.bound,
            bernoulli_method: config.method,
            qualifying_only: config.qualifying_only,
            seed: config.seed,
        },
        primes: entries,
        summary,
    };
    Ok(ScanOutput { report, bernoulli_dump: dump })
}

/// Serializes a report. JSON is a single object with keys in the documented
/// order and integers in decimal; CSV has the fixed header
/// `p,residue_mod_4,irregular_pairs,indices,vandiver,qualifies` with
/// multi-valued cells joined by semicolons.
pub fn emit(report: &ScanReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut out = String::from("p,residue_mod_4,irregular_pairs,indices,vandiver,qualifies\n");
            for e in &report.primes {
                let pairs: Vec<String> =
                    e.irregular_pairs.iter().map(|ip| ip.k.to_string()).collect();
                let indices: Vec<String> =
                    e.admissible_indices.iter().map(|a| a.i.to_string()).collect();
                let vandiver = match e.vandiver_status {
                    VandiverStatus::AssumedFromLiterature => "assumed",
                    VandiverStatus::NotChecked => "not_checked",
                };
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    e.p,
                    e.residue_mod_4,
                    pairs.join(";"),
                    indices.join(";"),
                    vandiver,
                    e.qualifies
                ));
            }
            out
        }
    }
}

/// Cohomology dimensions of one character power, as printed by the
/// `verify-balanced` subcommand.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct CharDimsRow {
    pub character: &'static str,
    pub exponent: u64,
    pub h0: u32,
    pub h1: u32,
    pub h2: u32,
}

fn dims_row(label: &'static str, c: CharPower) -> CharDimsRow {
    let LocalDims { h0, h1, h2 } = local_h_dims(c);
    CharDimsRow { character: label, exponent: c.exponent(), h0, h1, h2 }
}

/// Verdict of the `verify-balanced` subcommand: the dimension ledger for
/// chi^i, the trivial character, chi^{-i} and chi, the balance check, and
/// the flags that decide the exit status.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct BalancedVerdict {
    pub p: u64,
    pub i: u64,
    pub dims: Vec<CharDimsRow>,
    pub ad0_h0: u32,
    pub tangent_dim: u32,
    pub balanced: bool,
    pub i_odd: bool,
    /// 2 <= i <= p-3, the window the scanner draws indices from.
    pub i_in_scanner_range: bool,
    /// i = 0 mod (p-1): the restricted character is trivial and the
    /// balance computation degenerates.
    pub degenerate_exponent: bool,
    pub pass: bool,
}

pub fn verify_balanced(p: u64, i: u64) -> Result<BalancedVerdict, CohomologyError> {
    let up = CharPower::new(p, i)?;
    let tangent = tangent_dim(p, i)?;
    let h0 = ad0_h0(p, i)?;
    let balanced = balanced_check(p, i)?;
    let dims = vec![
        dims_row("chi^i", up),
        dims_row("trivial", CharPower::new(p, 0)?),
        dims_row("chi^-i", up.negated()),
        dims_row("chi", CharPower::new(p, 1)?),
    ];
    let i_in_scanner_range = (2..=p - 3).contains(&i);
    Ok(BalancedVerdict {
        p,
        i,
        dims,
        ad0_h0: h0,
        tangent_dim: tangent,
        balanced,
        i_odd: i % 2 == 1,
        i_in_scanner_range,
        degenerate_exponent: up.exponent() == 0,
        pass: balanced && i_in_scanner_range,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(from: u64, to: u64) -> ScanConfig {
        ScanConfig { from, to, ..ScanConfig::default() }
    }

    fn qualifying(report: &ScanReport) -> Vec<u64> {
        report.primes.iter().filter(|e| e.qualifies).map(|e| e.p).collect()
    }

    #[test]
    fn scan_to_100_finds_37_only() {
        let out = scan(&config(5, 100)).unwrap();
        assert_eq!(qualifying(&out.report), vec![37]);
        let irregular: Vec<u64> = out
            .report
            .primes
            .iter()
            .filter(|e| !e.irregular_pairs.is_empty())
            .map(|e| e.p)
            .collect();
        assert_eq!(irregular, vec![37, 59, 67]);
        assert_eq!(out.report.summary.primes_scanned, 23);
        assert_eq!(out.report.summary.irregular, 3);
        assert_eq!(out.report.summary.qualifying, 1);
    }

    #[test]
    fn scan_empty_window() {
        let out = scan(&config(5, 12)).unwrap();
        assert_eq!(out.report.summary.irregular, 0);
        assert_eq!(out.report.summary.qualifying, 0);
        assert_eq!(out.report.primes.len(), 3); // 5, 7, 11
    }

    #[test]
    fn scan_100_to_160() {
        let out = scan(&config(100, 160)).unwrap();
        let q = qualifying(&out.report);
        assert!(q.contains(&101) && q.contains(&157), "got {q:?}");
        let by_p = |p: u64| out.report.primes.iter().find(|e| e.p == p).unwrap();
        let idx101: Vec<u64> = by_p(101).admissible_indices.iter().map(|a| a.i).collect();
        assert_eq!(idx101, vec![33]);
        let mut idx157: Vec<u64> = by_p(157).admissible_indices.iter().map(|a| a.i).collect();
        idx157.sort_unstable();
        assert_eq!(idx157, vec![47, 95]);
    }

    #[test]
    fn config_validation() {
        assert!(matches!(
            scan(&config(3, 100)),
            Err(ScanError::InvalidRange { .. })
        ));
        assert!(matches!(
            scan(&config(50, 10)),
            Err(ScanError::InvalidRange { .. })
        ));
        let mut c = config(5, 20);
        c.threads = 0;
        assert!(matches!(scan(&c), Err(ScanError::NoThreads)));
    }

    #[test]
    fn every_prime_appears_exactly_once() {
        let out = scan(&config(5, 500)).unwrap();
        let ps: Vec<u64> = out.report.primes.iter().map(|e| e.p).collect();
        assert_eq!(ps, crate::primality::primes_in_range(5, 500));
        // summary equals recomputation from the body
        assert_eq!(out.report.summary, summarize(&out.report.primes));
    }

    #[test]
    fn thread_count_does_not_change_bytes() {
        let single = scan(&config(5, 300)).unwrap();
        let mut c = config(5, 300);
        c.threads = 4;
        let multi = scan(&c).unwrap();
        assert_eq!(
            emit(&single.report, OutputFormat::Json),
            emit(&multi.report, OutputFormat::Json)
        );
        assert_eq!(
            emit(&single.report, OutputFormat::Csv),
            emit(&multi.report, OutputFormat::Csv)
        );
    }

    #[test]
    fn qualifying_only_filters_list_not_summary() {
        let mut c = config(5, 100);
        c.qualifying_only = true;
        let out = scan(&c).unwrap();
        assert_eq!(out.report.primes.len(), 1);
        assert_eq!(out.report.primes[0].p, 37);
        assert_eq!(out.report.summary.primes_scanned, 23);
    }

    #[test]
    fn csv_golden_rows() {
        let out = scan(&config(5, 40)).unwrap();
        let csv = emit(&out.report, OutputFormat::Csv);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "p,residue_mod_4,irregular_pairs,indices,vandiver,qualifies");
        assert!(lines.contains(&"37,1,32,5,assumed,true"));
        assert!(lines.contains(&"13,1,,,assumed,false"));
    }

    #[test]
    fn json_shape() {
        let mut c = config(5, 40);
        c.collect_bernoulli_dump = true;
        let out = scan(&c).unwrap();
        let json = emit(&out.report, OutputFormat::Json);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["tool"], "cyclo-scan");
        assert_eq!(v["config"]["from"], 5);
        assert_eq!(v["config"]["bernoulli_method"], "series");
        assert_eq!(v["config"]["vandiver_policy"], "assume");
        let p37 = v["primes"]
            .as_array()
            .unwrap()
            .iter()
            .find(|e| e["p"] == 37)
            .unwrap();
        assert_eq!(p37["irregular_pairs"][0]["k"], 32);
        assert_eq!(p37["admissible_indices"][0]["i"], 5);
        assert_eq!(p37["admissible_indices"][0]["certification"], "ribet_certified");
        assert_eq!(p37["det_exponents"][0], 49289);
        assert_eq!(p37["vandiver_status"], "assumed_from_literature");
        assert_eq!(p37["qualifies"], true);
        assert_eq!(p37["error"], serde_json::Value::Null);

        let dump = out.bernoulli_dump.unwrap();
        assert!(dump.contains("7,2,6\n7,4,3\n"));
        assert!(dump.contains("37,32,0\n"));
    }

    #[test]
    fn verify_balanced_cases() {
        let v = verify_balanced(37, 5).unwrap();
        assert!(v.pass && v.balanced && v.i_odd && v.i_in_scanner_range);
        assert_eq!(v.tangent_dim, 2);
        assert_eq!(v.ad0_h0, 1);
        assert_eq!(v.dims[0], CharDimsRow { character: "chi^i", exponent: 5, h0: 0, h1: 1, h2: 0 });
        assert_eq!(v.dims[1], CharDimsRow { character: "trivial", exponent: 0, h0: 1, h1: 2, h2: 0 });
        assert_eq!(v.dims[3], CharDimsRow { character: "chi", exponent: 1, h0: 0, h1: 2, h2: 1 });

        let v = verify_balanced(37, 4).unwrap();
        assert!(v.pass && v.balanced && v.i_in_scanner_range);
        assert!(!v.i_odd, "even index must be flagged");

        let v = verify_balanced(7, 6).unwrap();
        assert!(!v.pass && !v.balanced && !v.i_in_scanner_range);
        assert!(v.degenerate_exponent);
        assert_eq!(v.ad0_h0, 3);

        assert!(verify_balanced(7, 0).is_err());
        assert!(verify_balanced(8, 3).is_err());
    }
}
