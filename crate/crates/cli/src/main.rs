//! `phiext` command-line interface.
//!
//! ```sh
//! phiext check  --scenario power.scn
//! phiext extend --scenario annulus.scn --grid.max 1e4 --out.report ext.txt
//! ```
//!
//! Exit status: 0 when every check (and the certificate) holds, 1 when
//! something fails or the extension is refused, 2 for configuration, parse
//! and I/O errors, 3 for internal errors.

use std::fs;
use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use phiext::catalog::{emit_report, parse_scenario_with, run_scenario, Task};
use phiext::Error;

#[derive(Parser)]
#[command(name = "phiext", version, about = "Check and extend generalized Φ-functions on sampled domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify (A0), (A1), (A1)_Ω, (A2), (aInc)/(aDec) on the scenario's domain.
    Check(RunArgs),
    /// Extend φ to the ambient space and certify the result.
    Extend(RunArgs),
    /// Build a ball chain between two points and compare with the count bound.
    Chain(RunArgs),
    /// Tabulate φ⁻¹ and summary values without verdicts.
    Report(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file.
    #[arg(long)]
    scenario: PathBuf,
    /// Override `grid.max`.
    #[arg(long = "grid.max")]
    grid_max: Option<String>,
    /// Override `out.report`; `-` writes to stdout.
    #[arg(long = "out.report")]
    out_report: Option<String>,
    /// Override `out.csv`.
    #[arg(long = "out.csv")]
    out_csv: Option<String>,
    /// Seed for ball and pair sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Any other `key=value` override.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_)
        | Error::Parse { .. }
        | Error::Io { .. }
        | Error::Disconnected { .. }
        | Error::NonMonotone { .. }
        | Error::NotANumber { .. } => 2,
        Error::Refused(_) => 1,
        Error::Structural(_) => 3,
    }
}

fn run(task: Task, args: RunArgs) -> Result<bool, Error> {
    let text = fs::read_to_string(&args.scenario).map_err(|e| Error::Io {
        path: args.scenario.clone(),
        source: e,
    })?;
    let mut overrides = vec![("task".to_string(), task.as_str().to_string())];
    if let Some(v) = args.grid_max {
        overrides.push(("grid.max".into(), v));
    }
    if let Some(v) = args.out_report {
        overrides.push(("out.report".into(), v));
    }
    if let Some(v) = args.out_csv {
        overrides.push(("out.csv".into(), v));
    }
    if let Some(s) = args.seed {
        overrides.push(("seed".into(), s.to_string()));
    }
    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    let scenario = parse_scenario_with(&text, &overrides)?;
    let report = run_scenario(&scenario)?;
    let text = emit_report(&report, scenario.out.format);
    match scenario.out.report.as_deref() {
        None | Some("-") => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source: e,
                })?;
        }
        Some(path) => {
            fs::write(Path::new(path), text).map_err(|e| Error::Io {
                path: PathBuf::from(path),
                source: e,
            })?;
            eprintln!(
                "{}: {} -> {path}",
                scenario.task,
                if report.verdict() { "holds" } else { "FAILS" }
            );
        }
    }
    Ok(report.verdict())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (task, args) = match cli.command {
        Command::Check(a) => (Task::Check, a),
        Command::Extend(a) => (Task::Extend, a),
        Command::Chain(a) => (Task::Chain, a),
        Command::Report(a) => (Task::Report, a),
    };
    match panic::catch_unwind(AssertUnwindSafe(|| run(task, args))) {
        Ok(Ok(true)) => ExitCode::SUCCESS,
        Ok(Ok(false)) => ExitCode::from(1),
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => {
            eprintln!("error: internal failure (see panic message above)");
            ExitCode::from(3)
        }
    }
}
