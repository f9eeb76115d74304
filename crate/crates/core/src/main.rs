use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use pseudolim::lab::{self, LabError, PRECISION_ENV};

/// Certificate runner for pseudo-convergent sequences over valued fields.
///
/// Exit codes: 0 PASS, 1 FAIL, 2 INDETERMINATE, 3 configuration or IO error.
#[derive(Parser)]
#[command(name = "pseudolim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in scenario or a scenario file and print its report.
    Run {
        /// Built-in name (see `list`) or path to a TOML scenario.
        scenario: String,
        /// Precision of the pseudo limit; overrides the scenario.
        #[arg(long, env = PRECISION_ENV)]
        precision: Option<u32>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// List the built-in scenarios.
    List,
    /// Recompute a report from its recorded inputs and compare.
    Verify { report: PathBuf },
}

fn execute(cli: Cli) -> Result<i32, LabError> {
    match cli.command {
        Command::List => {
            for name in lab::list_scenarios() {
                println!("{name}");
            }
            Ok(0)
        }
        Command::Run { scenario, precision, report } => {
            if precision == Some(0) {
                return Err(lab::ConfigError::new("--precision", "must be positive").into());
            }
            let mut s = lab::load_scenario(&scenario)?;
            if let Some(p) = precision {
                s = s.with_precision(p);
            }
            let started = Instant::now();
            let r = lab::run(&s)?;
            eprintln!("{}: {} in {:.3}s", r.scenario, r.outcome, started.elapsed().as_secs_f64());
            match report {
                Some(path) => lab::emit_report(&r, &path)?,
                None => print!("{}", r.to_canonical_json()),
            }
            Ok(r.outcome.exit_code())
        }
        Command::Verify { report } => {
            let text = std::fs::read_to_string(&report)
                .map_err(|e| LabError::Io { path: report.display().to_string(), message: e.to_string() })?;
            let v = lab::verify_report(&text)?;
            if v.mismatches.is_empty() {
                println!("consistent: {}", v.outcome);
            } else {
                println!("inconsistent fields: {}", v.mismatches.join(", "));
            }
            Ok(v.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { LabError::EXIT_CODE as u8 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(LabError::EXIT_CODE as u8)
        }
    }
}
