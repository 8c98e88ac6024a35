//! The `mscd` command line: `detect` runs the multi-scale sweep on an edge
//! list, `generate` writes a planted two-level benchmark, and `evaluate`
//! scores a detect run with windowed and reference NMI.

use std::ffi::OsString;

use clap::{ArgAction, Parser, Subcommand};

mod detect;
mod error;
mod evaluate;
mod files;
mod generate;

pub use error::{CliError, Result};
pub use evaluate::{detection_ranges, DetectionRange};

#[derive(Debug, Parser)]
#[command(name = "mscd", version, about = "Multi-scale overlapping community detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Detect communities at every scale of a sweep.
    Detect(detect::DetectArgs),
    /// Generate a benchmark network with planted micro and macro communities.
    Generate(generate::GenerateArgs),
    /// Score the covers of a detect run.
    Evaluate(evaluate::EvaluateArgs),
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    let result = match cli.command {
        Command::Detect(args) => detect::run(&args),
        Command::Generate(args) => generate::run(&args),
        Command::Evaluate(args) => evaluate::run(&args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
