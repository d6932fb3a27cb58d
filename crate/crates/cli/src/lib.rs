//! The `coulomb-info` command line, as a library so that it can be driven
//! in-process.

mod output;

use std::ffi::OsString;
use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Parser, Subcommand, ValueEnum};
use coulomb_info::asymptotics::rydberg_study;
use coulomb_info::measures::{MeasureOptions, MeasureSet};
use coulomb_info::oracle::{verify, ComparisonReport, Oracle, Tolerances};
use coulomb_info::quadrature::DEFAULT_BUDGET;
use coulomb_info::scan::{canonical_name, measure_names, scan};
use coulomb_info::QuantumState;
use serde_json::json;

pub use output::{OutputRecord, SCHEMA_VERSION};

const BUDGET_ENV: &str = "COULOMB_INFO_BUDGET";

/// Spreading and information measures of one-dimensional hydrogenic states.
#[derive(Debug, Parser)]
#[command(name = "coulomb-info", version)]
struct Cli {
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Maximum integrand evaluations per integral (overrides COULOMB_INFO_BUDGET).
    #[arg(long, global = true)]
    budget: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Every measure of one state, with provenance.
    Measures {
        #[arg(short = 'n', long = "n")]
        n: u32,
        #[arg(short = 'Z', long = "Z", allow_negative_numbers = true)]
        z: f64,
        /// Attach quadrature values next to the closed forms.
        #[arg(long)]
        numeric: bool,
        /// Use the Rydberg asymptote for the position Shannon entropy (n >= 2).
        #[arg(long)]
        asymptotic: bool,
    },
    /// Compare closed forms with quadrature for n = 1..=n_max and each Z.
    Verify {
        #[arg(long = "n-max")]
        n_max: u32,
        #[arg(
            short = 'Z',
            long = "Z",
            value_delimiter = ',',
            default_value = "1",
            allow_negative_numbers = true
        )]
        z: Vec<f64>,
        /// Per-row tolerance, e.g. `--tol heisenberg=1e-15`. Repeatable.
        #[arg(long = "tol", value_parser = parse_tol)]
        tol: Vec<(String, f64)>,
    },
    /// One measure tabulated over a range of n.
    Scan {
        /// Measure name (kebab-case or snake_case).
        measure: String,
        /// Range `lo..hi`, inclusive.
        #[arg(short = 'n', long = "n", value_parser = parse_range)]
        n: (u32, u32),
        #[arg(short = 'Z', long = "Z", allow_negative_numbers = true)]
        z: f64,
        #[arg(long, default_value_t = 1)]
        step: u32,
    },
    /// Position Shannon entropy of excited states against the Rydberg asymptote.
    Asymptotics {
        #[arg(short = 'n', long = "n", value_delimiter = ',', required = true)]
        n: Vec<u32>,
        #[arg(short = 'Z', long = "Z", default_value_t = 1.0, allow_negative_numbers = true)]
        z: f64,
    },
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got '{s}'"))?;
    let v: f64 = value.trim().parse().map_err(|e| format!("bad tolerance '{value}': {e}"))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(format!("tolerance must be finite and > 0, got {v}"));
    }
    Ok((name.trim().to_string(), v))
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected lo..hi, got '{s}'"))?;
    let lo: u32 = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: u32 = hi
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|e| format!("bad upper bound: {e}"))?;
    Ok((lo, hi))
}

/// Failure kinds, mapped to the process exit code.
enum Failure {
    /// Verification failure or non-convergence (exit 1).
    Check(String),
    /// Bad arguments (exit 2).
    Usage(String),
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn io_err<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Check(format!("write failed: {e}"))
}

fn resolve_budget(flag: Option<usize>) -> Result<usize, Failure> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|e| Failure::Usage(format!("{BUDGET_ENV}={v}: {e}"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

/// Parses `args` (program name first), runs the command writing results to
/// `out` and diagnostics to standard error, and returns the exit code:
/// 0 success, 1 verification failure or non-convergence, 2 usage error.
pub fn run<I, T, W>(args: I, out: &mut W) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(Failure::Check(msg)) => {
            eprintln!("coulomb-info: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("coulomb-info: {msg}");
            2
        }
    }
}

fn execute<W: Write>(cli: Cli, out: &mut W) -> Result<(), Failure> {
    let budget = resolve_budget(cli.budget)?;
    if budget == 0 {
        return Err(Failure::Usage("budget must be positive".into()));
    }
    let oracle = Oracle::default().with_budget(budget);
    match cli.command {
        Command::Measures {
            n,
            z,
            numeric,
            asymptotic,
        } => {
            let state = QuantumState::new(n, z).map_err(usage)?;
            let options = MeasureOptions { numeric, asymptotic };
            let set = MeasureSet::compute(state, options, &oracle);
            let unconverged = set.unconverged.clone();
            match cli.format {
                Format::Json => {
                    let inputs = json!({
                        "n": n, "Z": z, "numeric": numeric, "asymptotic": asymptotic, "budget": budget,
                    });
                    OutputRecord::new("measures", inputs, &set).write_json(&mut *out).map_err(io_err)?;
                }
                Format::Csv => output::measures_csv(&set, &mut *out).map_err(io_err)?,
            }
            if !unconverged.is_empty() {
                return Err(Failure::Check(format!(
                    "integrals did not converge: {}",
                    unconverged.join(", ")
                )));
            }
        }
        Command::Verify { n_max, z, tol } => {
            if n_max == 0 {
                return Err(Failure::Usage("--n-max must be >= 1".into()));
            }
            let mut states = Vec::new();
            for n in 1..=n_max {
                for &zi in &z {
                    states.push(QuantumState::new(n, zi).map_err(usage)?);
                }
            }
            let mut tolerances = Tolerances::default();
            for (name, v) in &tol {
                tolerances = tolerances.with_override(name, *v);
            }
            let reports = verify_grid(&states, &tolerances, &oracle);
            let failed: Vec<String> = reports
                .iter()
                .filter(|r| !r.overall_pass)
                .map(|r| {
                    let rows: Vec<&str> = r.failures().map(|f| f.name.as_str()).collect();
                    format!("n={} Z={}: {}", r.state.n(), r.state.z(), rows.join(","))
                })
                .collect();
            match cli.format {
                Format::Json => {
                    let overrides: serde_json::Map<_, _> =
                        tol.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
                    let inputs = json!({
                        "n_max": n_max, "Z": z, "tol": overrides, "budget": budget,
                    });
                    OutputRecord::new("verify", inputs, &reports).write_json(&mut *out).map_err(io_err)?;
                }
                Format::Csv => output::verify_csv(&reports, &mut *out).map_err(io_err)?,
            }
            if !failed.is_empty() {
                return Err(Failure::Check(format!("verification failed for {}", failed.join("; "))));
            }
        }
        Command::Scan { measure, n, z, step } => {
            if canonical_name(&measure).is_none() {
                return Err(Failure::Usage(format!(
                    "unknown measure '{measure}'; valid names: {}",
                    measure_names().join(", ")
                )));
            }
            QuantumState::new(n.0.max(1), z).map_err(usage)?;
            let table = scan(&measure, n.0, n.1, step, z, &oracle).map_err(usage)?;
            match cli.format {
                Format::Json => {
                    let inputs = json!({
                        "measure": measure, "n": [n.0, n.1], "Z": z, "step": step, "budget": budget,
                    });
                    OutputRecord::new("scan", inputs, &table).write_json(&mut *out).map_err(io_err)?;
                }
                Format::Csv => output::scan_csv(&table, &mut *out).map_err(io_err)?,
            }
        }
        Command::Asymptotics { n, z } => {
            QuantumState::new(1, z).map_err(usage)?;
            let rows = rydberg_study(&n, z, &oracle).map_err(usage)?;
            match cli.format {
                Format::Json => {
                    let inputs = json!({ "n": n, "Z": z, "budget": budget });
                    OutputRecord::new("asymptotics", inputs, &rows).write_json(&mut *out).map_err(io_err)?;
                }
                Format::Csv => output::asymptotics_csv(&rows, &mut *out).map_err(io_err)?,
            }
            let bad: Vec<String> = rows
                .iter()
                .filter(|r| !r.converged)
                .map(|r| r.n.to_string())
                .collect();
            if !bad.is_empty() {
                return Err(Failure::Check(format!(
                    "Shannon integral did not converge for n = {}",
                    bad.join(", ")
                )));
            }
        }
    }
    out.flush().map_err(io_err)
}

/// Runs `verify` over the grid on all available cores; the output order
/// follows `states` regardless of completion order.
fn verify_grid(states: &[QuantumState], tolerances: &Tolerances, oracle: &Oracle) -> Vec<ComparisonReport> {
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(states.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<ComparisonReport>>> = Mutex::new(vec![None; states.len()]);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(state) = states.get(i) else { break };
                let report = verify(*state, tolerances, oracle);
                slots.lock().expect("no worker panicked")[i] = Some(report);
            });
        }
    });
    slots
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .map(|r| r.expect("every state was verified"))
        .collect()
}
