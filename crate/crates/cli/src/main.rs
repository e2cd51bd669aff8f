use std::fs;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process;

use clap::{Parser, ValueEnum};

use monorep::TolClass;
use monorep_cli::{exit_code, parse_scenario, run, ExitCode, RunOptions};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TolArg {
    Strict,
    Grid,
}

/// Runs a scenario file and prints a JSON report.
#[derive(Debug, Parser)]
#[command(name = "monorep", version)]
struct Args {
    /// Scenario file.
    #[arg(long)]
    scenario: PathBuf,
    /// Write the refinement trace as CSV (br-refine and strict-br).
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance class floor for verdicts.
    #[arg(long, value_enum)]
    tol_class: Option<TolArg>,
}

fn fail(code: ExitCode, msg: impl std::fmt::Display) -> ! {
    eprintln!("error: {msg}");
    process::exit(code as i32)
}

fn main() {
    let args = Args::parse();
    let text = fs::read_to_string(&args.scenario)
        .unwrap_or_else(|e| fail(ExitCode::Parse, format!("{}: {e}", args.scenario.display())));
    let scenario = parse_scenario(&text).unwrap_or_else(|e| fail(ExitCode::Parse, e));
    let opts = RunOptions {
        seed: args.seed,
        tol_class: args.tol_class.map(|t| match t {
            TolArg::Strict => TolClass::ClosedForm,
            TolArg::Grid => TolClass::Grid,
        }),
    };
    let mut report = run(&scenario, &opts).unwrap_or_else(|e| fail(exit_code(&e), e));
    if let Some(path) = &args.trace_out {
        match &report.trace {
            Some(trace) => {
                let file = fs::File::create(path)
                    .unwrap_or_else(|e| fail(ExitCode::Parse, format!("{}: {e}", path.display())));
                trace
                    .write_csv(BufWriter::new(file))
                    .unwrap_or_else(|e| fail(ExitCode::Parse, format!("{}: {e}", path.display())));
            }
            None => report
                .warnings
                .push(format!("--trace-out ignored: {} produces no trace", report.command)),
        }
    }
    println!("{}", report.to_json());
}
