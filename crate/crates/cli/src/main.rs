//! `conley`: validate, assemble and analyze p-connection matrices from JSON
//! input files.
//!
//! Exit status: 0 success, 1 the data violates the model, 2 the input could
//! not be read or parsed, 3 the requested precision was not enough.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "conley", version, about = "p-connection matrices for Morse decompositions on regular covers")]
struct Cli {
    #[command(subcommand)]
    command: CommandLine,
}

#[derive(Subcommand, Debug)]
enum CommandLine {
    /// Check the input: schema, order, degrees and coefficient regime.
    Validate(RunArgs),
    /// Assemble the p-connection matrix N∆.
    Assemble(RunArgs),
    /// Collapse N∆ to the classical connection matrix.
    Project(RunArgs),
    /// Homology of the Novikov or Morse complex.
    Homology(RunArgs),
    /// The tower of truncations over Z[t]/(t^(ℓ+1)).
    Tower(RunArgs),
    /// Everything that applies to the input.
    Report(RunArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Input document (JSON).
    #[arg(long, short)]
    pub input: PathBuf,
    /// Retained exponents for Novikov series.
    #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u32).range(1..))]
    pub precision: u32,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Classical connection matrix to compare the projection with.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Top level of the truncation tower.
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// Where to write the JSON artifact of `assemble`.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Assemble,
    Project,
    Homology,
    Tower,
    Report,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        CommandLine::Validate(a) => (Command::Validate, a),
        CommandLine::Assemble(a) => (Command::Assemble, a),
        CommandLine::Project(a) => (Command::Project, a),
        CommandLine::Homology(a) => (Command::Homology, a),
        CommandLine::Tower(a) => (Command::Tower, a),
        CommandLine::Report(a) => (Command::Report, a),
    };
    let outcome = commands::run(command, &args);
    if !outcome.stdout.is_empty() {
        print!("{}", outcome.stdout);
    }
    if !outcome.stderr.is_empty() {
        eprint!("{}", outcome.stderr);
    }
    ExitCode::from(outcome.status)
}
