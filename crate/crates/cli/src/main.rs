//! `lnq`: exact verifier for the subspace lattice L_N(q).

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lnq_core::gfspace::DEFAULT_SIZE_LIMIT;
use lnq_core::pipeline::{dump, run, CheckGroup, RunConfig, DUMP_TARGETS};
use lnq_core::report::VerificationReport;

#[derive(Parser)]
#[command(name = "lnq", version, about = "Exact verification of the Q-polynomial structure of L_N(q)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run checks and print a report.
    Verify {
        #[command(flatten)]
        field: FieldArgs,
        /// Comma-separated groups: poset, operators, split-bases, split-actions,
        /// split-decompositions, qpoly, tridiag, modules, all
        #[arg(long, default_value = "all")]
        checks: String,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
        /// Also write the JSON report to this file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print a matrix in text form.
    Dump {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(help = format!("one of: {DUMP_TARGETS}"))]
        target: String,
    },
    /// Render a saved JSON report.
    Report {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
}

#[derive(Args)]
struct FieldArgs {
    /// Field order q, or its characteristic when --ext-degree is given.
    #[arg(long)]
    q: u64,
    #[arg(long)]
    ext_degree: Option<u32>,
    /// Monic modulus coefficients, constant term first.
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u64>>,
    #[arg(long = "N", short = 'N')]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_SIZE_LIMIT)]
    size_limit: usize,
    /// Change one entry of A before running.
    #[arg(long)]
    inject_fault: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Json,
}

impl FieldArgs {
    fn config(self, checks: Vec<CheckGroup>) -> RunConfig {
        RunConfig {
            q: self.q,
            ext_degree: self.ext_degree,
            modulus: self.modulus,
            n: self.n,
            size_limit: self.size_limit,
            checks,
            inject_fault: self.inject_fault,
        }
    }
}

fn render(report: &VerificationReport, format: Format) -> String {
    match format {
        Format::Human => report.to_human(),
        Format::Json => report.to_json(),
    }
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify { field, checks, format, output } => {
            let config = field.config(CheckGroup::parse_list(&checks)?);
            let report = run(&config)?;
            println!("{}", render(&report, format));
            if let Some(path) = output {
                std::fs::write(&path, report.to_json()).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(report.overall_pass())
        }
        Command::Dump { field, target } => {
            print!("{}", dump(&field.config(Vec::new()), &target)?);
            Ok(true)
        }
        Command::Report { path, format } => {
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let report = VerificationReport::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
            println!("{}", render(&report, format));
            Ok(report.overall_pass())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
