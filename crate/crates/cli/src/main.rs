//! `cyclo-scan`: scan prime ranges for irregular primes admitting odd
//! eigenspace indices, and run the standalone verification subcommands.
//!
//! Exit codes: 0 success, 1 configuration error, 2 a verification failed or
//! an internal invariant was violated, 3 I/O error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cyclo_core::bernoulli::BernoulliMethod;
use cyclo_core::eigenspace::{VandiverMode, VandiverPolicy, DEFAULT_VANDIVER_BOUND};
use cyclo_core::scan::{emit, scan, verify_balanced, OutputFormat, ScanConfig, ScanError};
use cyclo_core::sl2::{level_lift_check, Sl2Error, DEFAULT_ELEMENT_BUDGET};

const EXIT_CONFIG: u8 = 1;
const EXIT_CHECK_FAILED: u8 = 2;
const EXIT_IO: u8 = 3;

/// Environment variable overriding the SL2 closure element budget.
const BUDGET_ENV: &str = "CYCLO_SCAN_ELEMENT_BUDGET";

#[derive(Parser)]
#[command(name = "cyclo-scan", version, about, subcommand_required = true, arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a prime range and report irregular pairs, admissible indices
    /// and qualification per prime
    Scan {
        /// Lower end of the inclusive prime range
        #[arg(long, default_value_t = 5)]
        from: u64,
        /// Upper end of the inclusive prime range
        #[arg(long, default_value_t = 3500)]
        to: u64,
        /// Worker threads (default: all available cores)
        #[arg(long)]
        threads: Option<usize>,
        /// Report format written to stdout
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// Restrict the report body to qualifying primes
        #[arg(long)]
        qualifying_only: bool,
        /// Vandiver's conjecture policy for primes beyond the verified bound
        #[arg(long, value_enum, default_value_t = VandiverArg::Assume)]
        vandiver: VandiverArg,
        /// Bound below which published verification of Vandiver's
        /// conjecture is accepted
        #[arg(long, default_value_t = DEFAULT_VANDIVER_BOUND)]
        vandiver_bound: u64,
        /// Bernoulli table method
        #[arg(long, value_enum, default_value_t = MethodArg::Series)]
        bernoulli: MethodArg,
        /// Write every computed Bernoulli table as `p,k,B_k` lines to PATH
        #[arg(long, value_name = "PATH")]
        dump_bernoulli: Option<PathBuf>,
        /// Seed echoed into the report
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the balanced dimension identity for the character power i at p
    /// and print the cohomology ledger
    VerifyBalanced {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        i: u64,
    },
    /// Finite-level check that congruence subgroup containment at level 2
    /// lifts to level 3, over seeded random lifts
    #[command(name = "verify-lemma34")]
    VerifyLemma34 {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 10)]
        trials: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum VandiverArg {
    /// Accept primes below the bound, mark larger ones unchecked
    Assume,
    /// Error out on primes at or beyond the bound
    Strict,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    /// Classical recurrence (the cross-validation oracle)
    Oracle,
    /// Quadratic power-series inversion (default)
    Series,
    /// Newton/NTT power-series inversion
    Fast,
}

fn write_stdout(text: &str) -> Result<(), u8> {
    std::io::stdout().write_all(text.as_bytes()).map_err(|e| {
        eprintln!("cyclo-scan: failed to write output: {e}");
        EXIT_IO
    })
}

fn to_json(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("verdicts serialize");
    s.push('\n');
    s
}

fn run_scan(
    config: ScanConfig,
    format: OutputFormat,
    dump_path: Option<PathBuf>,
) -> Result<(), u8> {
    let output = scan(&config).map_err(|e| {
        eprintln!("cyclo-scan: {e}");
        match e {
            ScanError::Inconsistency(_) => EXIT_CHECK_FAILED,
            _ => EXIT_CONFIG,
        }
    })?;
    if let (Some(path), Some(dump)) = (dump_path, output.bernoulli_dump.as_ref()) {
        std::fs::write(&path, dump).map_err(|e| {
            eprintln!("cyclo-scan: cannot write {}: {e}", path.display());
            EXIT_IO
        })?;
    }
    write_stdout(&emit(&output.report, format))
}

fn element_budget() -> Result<usize, u8> {
    match std::env::var(BUDGET_ENV) {
        Ok(raw) => raw.trim().parse().map_err(|_| {
            eprintln!("cyclo-scan: {BUDGET_ENV} must be a positive integer, got {raw:?}");
            EXIT_CONFIG
        }),
        Err(_) => Ok(DEFAULT_ELEMENT_BUDGET),
    }
}

fn run(command: Command) -> Result<(), u8> {
    match command {
        Command::Scan {
            from,
            to,
            threads,
            format,
            qualifying_only,
            vandiver,
            vandiver_bound,
            bernoulli,
            dump_bernoulli,
            seed,
        } => {
            let threads = threads.unwrap_or_else(|| {
                std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
            });
            let config = ScanConfig {
                from,
                to,
                vandiver: VandiverPolicy {
                    mode: match vandiver {
                        VandiverArg::Assume => VandiverMode::Assume,
                        VandiverArg::Strict => VandiverMode::Strict,
                    },
                    bound: vandiver_bound,
                },
                method: match bernoulli {
                    MethodArg::Oracle => BernoulliMethod::Recurrence,
                    MethodArg::Series => BernoulliMethod::SeriesInversion,
                    MethodArg::Fast => BernoulliMethod::FastSeriesInversion,
                },
                threads,
                qualifying_only,
                seed,
                collect_bernoulli_dump: dump_bernoulli.is_some(),
            };
            let format = match format {
                FormatArg::Json => OutputFormat::Json,
                FormatArg::Csv => OutputFormat::Csv,
            };
            run_scan(config, format, dump_bernoulli)
        }
        Command::VerifyBalanced { p, i } => {
            let verdict = verify_balanced(p, i).map_err(|e| {
                eprintln!("cyclo-scan: {e}");
                EXIT_CONFIG
            })?;
            write_stdout(&to_json(&verdict))?;
            if verdict.pass {
                Ok(())
            } else {
                Err(EXIT_CHECK_FAILED)
            }
        }
        Command::VerifyLemma34 { p, trials, seed } => {
            let budget = element_budget()?;
            let verdict = level_lift_check(p, trials, seed, budget).map_err(|e| {
                eprintln!("cyclo-scan: {e}");
                match e {
                    Sl2Error::GeneratorCheckFailed(_) => EXIT_CHECK_FAILED,
                    _ => EXIT_CONFIG,
                }
            })?;
            write_stdout(&to_json(&verdict))?;
            if verdict.all_pass {
                Ok(())
            } else {
                Err(EXIT_CHECK_FAILED)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_CONFIG,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}
