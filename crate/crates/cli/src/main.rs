//! `kannappan`: characters, family enumeration, classification and the
//! numeric completeness check for `g(xyz0) = g(x)g(y) - f(x)f(y)`.

mod commands;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "kannappan", version, about = "Solve and classify the Kannappan-cosine equation on small semigroups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List characters with their null sets, additive and rho bases.
    Characters(Common),
    /// Enumerate family instances over a parameter grid.
    Solve(Common),
    /// Fit a solution pair to a family.
    Classify {
        #[command(flatten)]
        common: Common,
        /// JSON file with `f` and `g` value tables.
        #[arg(long)]
        pair: PathBuf,
    },
    /// Multistart numeric solve, then classify every root.
    VerifyTheorem(Common),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Finite,
    NaturalsWindow,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Cayley table file (text or JSON). Not used with the window backend.
    pub input: Option<PathBuf>,
    /// Distinguished element: an index for tables, a natural number for the window.
    #[arg(long)]
    pub z0: Option<usize>,
    /// Residual gate for floating-point checks.
    #[arg(long, default_value_t = kannappan_core::tol::RESIDUAL)]
    pub tolerance: f64,
    /// Parameter values, `name=v1,v2` (name one of d, c, q, gamma, alpha) or a bare list for all.
    #[arg(long)]
    pub grid: Vec<String>,
    /// Numeric starts; defaults to 200 n².
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Window size N for the naturals backend.
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long, value_enum, default_value_t = Backend::Finite)]
    pub backend: Backend,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Characters(c) => commands::characters(c),
        Command::Solve(c) => commands::solve(c),
        Command::Classify { common, pair } => commands::classify(common, pair),
        Command::VerifyTheorem(c) => commands::verify_theorem(c),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
