//! Command-line front end: `eval`, `verify`, `scan`, `det`.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 input or domain error, 3 numerical failure.

mod commands;
mod output;
mod spec;
mod suites;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_det, cmd_eval, cmd_scan, parse_values, schema_text, Axis};
pub use output::{emit, Cell, Table};
pub use spec::{parse_complex, parse_points, Format, PointPair, RunFlags, RunSpec, Scheme};
pub use suites::{run_suite, sample_coords, Bound, Check, Report, SuiteOverrides, SUITES};

use crate::error::Error;

#[derive(Debug, Parser)]
#[command(name = "szego", version, about = "Genus-two Szegő kernels from sewn surfaces")]
pub struct Cli {
    /// Print the output column layouts and exit.
    #[arg(long)]
    pub schema: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Kernel values at the given point pairs.
    Eval(RunFlags),
    /// Run a verification suite and print a JSON report.
    Verify(VerifyArgs),
    /// Kernel values while one parameter varies.
    Scan(ScanArgs),
    /// Determinants of the sewing operator.
    Det(RunFlags),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// One of: skew, dehn, modular-eps, modular-rho, det-identity, integral-eq, degeneration, convergence.
    pub suite: String,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub quad: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub run: RunFlags,
    #[arg(long, value_enum)]
    pub axis: Axis,
    /// Comma-separated axis values: |epsilon|, |rho| (phase from --eps/--rho), N or M.
    #[arg(long, allow_hyphen_values = true)]
    pub values: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_) | Error::Domain(_) => 2,
        Error::Numerical(_) => 3,
    }
}

fn write_table(spec: &RunSpec, t: crate::Result<Table>) -> crate::Result<()> {
    emit(&t?.render(spec.format)?, spec.flags.out.as_deref())
}

/// Runs a parsed command line and returns the process exit code; errors go to stderr.
pub fn run(cli: Cli) -> i32 {
    if cli.schema {
        print!("{}", schema_text());
        return 0;
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required (eval, verify, scan, det)");
        return 2;
    };
    let result = match command {
        Command::Eval(flags) => RunSpec::resolve(flags).and_then(|s| write_table(&s, cmd_eval(&s))),
        Command::Det(flags) => RunSpec::resolve(flags).and_then(|s| write_table(&s, cmd_det(&s))),
        Command::Scan(args) => RunSpec::resolve(args.run).and_then(|s| {
            let values = parse_values(&args.values)?;
            write_table(&s, cmd_scan(&s, args.axis, &values))
        }),
        Command::Verify(args) => {
            let ov = SuiteOverrides { order: args.order, quad: args.quad };
            match run_suite(&args.suite, ov) {
                Ok(report) => {
                    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
                    match emit(&text, args.out.as_deref()) {
                        Ok(()) if report.pass => return 0,
                        Ok(()) => return 1,
                        Err(e) => Err(e),
                    }
                }
                Err(e) => Err(e),
            }
        }
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
