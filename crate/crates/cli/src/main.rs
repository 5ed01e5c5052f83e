//! `pentarec` command-line front end.

mod commands;
mod input;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pentarec::number::{ArithmeticMode, DEFAULT_BIT_BUDGET, DOUBLE_BITS};

#[derive(Parser, Debug)]
#[command(
    name = "pentarec",
    version,
    about = "Simulate and classify x[n+1] = a·x[n-1] + b·x[n-1]·x[n-4]/(c·x[n-4] + d·x[n-2])"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Discriminants, characteristic roots and regime for one parameter set
    Classify(ClassifyArgs),
    /// Iterate the recurrence and write the orbit as CSV
    Simulate(SimulateArgs),
    /// Limit of the critical-case product solution
    CriticalLimit(CriticalArgs),
    /// Classify every cell of a parameter grid
    Scan(ScanArgs),
    /// Run the built-in verification suite
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub d: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct ModeArgs {
    /// Exact rational arithmetic
    #[arg(long)]
    pub exact: bool,
    /// Float mantissa bits (53 is hardware double)
    #[arg(long, env = "PENTAREC_FLOAT_BITS", default_value_t = DOUBLE_BITS)]
    pub precision: u32,
    /// Abort exact runs once a numerator or denominator exceeds this many bits
    #[arg(long, default_value_t = DEFAULT_BIT_BUDGET)]
    pub bit_budget: u64,
}

impl ModeArgs {
    pub fn mode(&self) -> ArithmeticMode {
        if self.exact {
            ArithmeticMode::ExactRational {
                bit_budget: self.bit_budget,
            }
        } else {
            ArithmeticMode::float(self.precision)
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write data to this file instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Significant digits in reports
    #[arg(long, default_value_t = 6)]
    pub digits: usize,
}

impl OutputArgs {
    pub fn sink(&self) -> io::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Treat |A| <= tol as zero
    #[arg(long, default_value_t = 0.0)]
    pub crit_tol: f64,
    /// One header row and one data row
    #[arg(long)]
    pub csv: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Five initial values x[-4]..x[0], comma separated
    #[arg(long, allow_hyphen_values = true)]
    pub seeds: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[command(flatten)]
    pub mode: ModeArgs,
    /// Add y = x[n]/x[n-2] and w = c + d·y columns
    #[arg(long)]
    pub ratios: bool,
    /// Use params (1/2, 1, 1, 1) and seeds (1, 1, 1, mu, mu)
    #[arg(long, conflicts_with_all = ["a", "b", "c", "d", "seeds"])]
    pub app_mu: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct CriticalArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub mu: String,
    /// Stop once the next log-term is at most tol
    #[arg(long, default_value_t = 1e-6, allow_hyphen_values = true)]
    pub tol: f64,
    /// Print exact partial products at five decimals
    #[arg(long)]
    pub table: bool,
    #[arg(long, default_value_t = 10)]
    pub rows: usize,
    /// Simulate from (1, 1, 1, mu, mu) at another critical point a,c,d
    #[arg(long, conflicts_with = "table")]
    pub explore: Option<String>,
    #[arg(long, default_value_t = 3000)]
    pub steps: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    /// Value or lo:hi:count
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
    #[arg(long, allow_hyphen_values = true)]
    pub c: String,
    #[arg(long, allow_hyphen_values = true)]
    pub d: String,
    #[arg(long, default_value_t = 0.0)]
    pub crit_tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_cells: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Run only these checks (repeatable or comma separated)
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    #[arg(long, default_value_t = pentarec::verify::DEFAULT_SEED)]
    pub seed: u64,
}

/// A failure with its process exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code,
            error: error.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<pentarec::Error>() {
            Some(e) if e.abort_index().is_some() => 3,
            Some(pentarec::Error::NonConvergence(_)) => 3,
            _ => 2,
        };
        Failure { code, error }
    }
}

impl From<pentarec::Error> for Failure {
    fn from(error: pentarec::Error) -> Self {
        anyhow::Error::from(error).into()
    }
}

impl From<io::Error> for Failure {
    fn from(error: io::Error) -> Self {
        Failure::new(2, error)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify(args) => commands::classify(&args),
        Command::Simulate(args) => commands::simulate(&args),
        Command::CriticalLimit(args) => commands::critical_limit(&args),
        Command::Scan(args) => commands::scan(&args),
        Command::Verify(args) => commands::verify(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}
