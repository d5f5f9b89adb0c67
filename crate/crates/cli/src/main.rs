use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use conecommit::commitment::presets::Preset;
use conecommit::coneprog::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use conecommit::SolverOptions;
use conecommit_cli::commands::{self, AnalyzeArgs, Outcome, ReportFormat};

/// Analyze integer-commitment protocols over general probabilistic theories.
///
/// Exit codes: 0 pass, 1 I/O error, 2 parse error, 3 invalid protocol,
/// 4 solver failure, 5 failed check, 6 bound inapplicable.
#[derive(Parser)]
#[command(name = "conecommit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SolverArgs {
    /// Absolute solver tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Iteration cap for the conic solver.
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => Self::Text,
            Format::Json => Self::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a protocol file and check the cheating trade-off.
    Analyze {
        path: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Cross-check Bob's value with independent oracles.
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value = "text")]
        report: Format,
        /// Write the underlying cone programs to this directory.
        #[arg(long, value_name = "DIR")]
        dump_programs: Option<PathBuf>,
        /// Skip the exact program for Alice.
        #[arg(long)]
        no_exact: bool,
    },
    /// Write a preset protocol file.
    Generate {
        #[arg(value_parser = PossibleValuesParser::new(Preset::NAMES))]
        preset: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        dim_a: Option<usize>,
        #[arg(long)]
        dim_b: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a cone program file.
    Solve {
        path: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value = "text")]
        report: Format,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                commands::EXIT_PARSE
            } else {
                0
            });
        }
    };
    let outcome: Outcome = match cli.command {
        Command::Analyze {
            path,
            solver,
            oracle,
            report,
            dump_programs,
            no_exact,
        } => commands::analyze(&AnalyzeArgs {
            path,
            solver: solver.options(),
            oracle,
            report: report.into(),
            dump_programs,
            exact: !no_exact,
        }),
        Command::Generate {
            preset,
            n,
            dim_a,
            dim_b,
            seed,
            out,
        } => commands::generate(&preset, n, dim_a, dim_b, seed, out.as_deref()),
        Command::Solve {
            path,
            solver,
            report,
        } => commands::solve(&path, &solver.options(), report.into()),
    };
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    if let Some(msg) = outcome.stderr {
        eprintln!("{msg}");
    }
    ExitCode::from(outcome.code)
}
